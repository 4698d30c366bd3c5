#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpoo/kernel.hpp"
#include "gpoo/trace.hpp"

namespace gpoo {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v);
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// H_N = Σ_{n≤N} 1/n, compensated.
[[nodiscard]] double harmonic_number(std::size_t N);

/// ⌊log₂ n⌋ for n ≥ 1.
[[nodiscard]] std::size_t floor_log2(std::size_t n);

struct DeviationResult {
    double empirical = 0.0;
    /// 2 exp(−u²/(2d²)); 0 when d = 0 and u > 0.
    double bound = 0.0;
    /// P(|f(x) − f(y)| ≥ u) = 2Φ(−u/d) exactly.
    double exact = 0.0;
    double distance = 0.0;
    std::size_t exceedances = 0;
    std::size_t trials = 0;
};

/// Monte Carlo of the increment tail with (f(x), f(y)) drawn from their joint normal.
[[nodiscard]] DeviationResult deviation_mc(const KernelSpec& spec, const Point& x, const Point& y, double u,
                                           std::size_t trials, std::uint64_t seed);

/// Terms Δ(⌊log₂ n⌋) for n = 1..N with running sums.
struct RegretSeries {
    std::size_t N = 0;
    std::vector<double> terms;
    std::vector<double> partial;
    double harmonic = 0.0;
};

[[nodiscard]] RegretSeries regret_series(const std::function<double(std::size_t)>& delta, std::size_t N);

/// β^{1/2} Σ_{n=1}^N Δ(⌊log₂ n⌋).
[[nodiscard]] double prop1_bound(const RegretSeries& series, double beta_max);

struct SeriesCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    [[nodiscard]] bool holds() const { return lhs <= rhs; }
};

/// lhs = Σ_{n≤N} C(2√m)^α 2^{−α⌊log₂ n⌋/m}, rhs = C(2√m)^α 2^{α/m} N^{1−α/m} H_N^{α/m}.
/// Requires m/α > 1.
[[nodiscard]] SeriesCheck prop2_check(const MetricAssumption& assumption, std::size_t N);

struct GuardReport {
    std::size_t runs = 0;
    std::size_t holding = 0;
    double fraction = 0.0;
    double threshold = 0.0;
    [[nodiscard]] bool pass() const { return fraction >= threshold; }
};

/// Does f* − incumbent ≤ β^{1/2} Δ hold at every expansion of this run?
[[nodiscard]] bool regret_guard_holds(const RunResult& run, double slack = 1e-9);

/// Fraction of runs where the guard holds throughout; threshold 1 − ε − 0.05.
[[nodiscard]] GuardReport empirical_regret_guard(const std::vector<RunResult>& runs, double epsilon);

struct HolderReport {
    /// Σ n^{−1/q} versus N^{1/p} H_N^{1/q}.
    SeriesCheck proof_sequence;
    bool random_sequences = true;
    bool harmonic_window = true;
    [[nodiscard]] bool pass() const { return proof_sequence.lhs <= proof_sequence.rhs * (1 + 1e-12) && random_sequences && harmonic_window; }
};

/// Hölder on a_n = 1, b_n = n^{−1/q} and on 100 seeded random pairs of
/// length N; for N ≥ 1000 also H_N / ln N ∈ [1, 1 + 1/ln N + 0.01].
[[nodiscard]] HolderReport hoelder_harmonic_selfcheck(std::size_t N, double p, double q, std::uint64_t seed = 0);

/// One entry of the theory report.
struct TheoryCheck {
    std::string check;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const TheoryCheck& c);

[[nodiscard]] const std::vector<std::string>& theory_check_names();

/// Run one named check (or all when `name` is empty). Unknown names throw std::invalid_argument.
[[nodiscard]] std::vector<TheoryCheck> verify_theory(const std::string& name, std::uint64_t seed);

}  // namespace gpoo
