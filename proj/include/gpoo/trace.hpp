#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gpoo/clock.hpp"
#include "gpoo/geometry.hpp"
#include "gpoo/partition.hpp"

namespace gpoo {

struct DataIntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One objective evaluation. Columns that an optimizer does not define
/// (e.g. Δ for random search) hold NaN and are written as empty cells.
struct RunRecord {
    std::size_t step = 0;
    Point x;
    double f_value = 0.0;
    double delta = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
    double utility = std::numeric_limits<double>::quiet_NaN();
    double best_value = 0.0;
    std::optional<double> simple_regret;
    std::optional<double> cum_regret;
    std::int64_t elapsed_ns = 0;
};

/// A leaf popped from the search tree. `best_before` is the incumbent at the
/// moment of expansion and `evaluations` the number of calls made so far.
struct ExpansionRecord {
    std::size_t evaluations = 0;
    std::size_t depth = 0;
    double f_center = 0.0;
    double delta = 0.0;
    double beta = 0.0;
    double utility = 0.0;
    double best_before = 0.0;
};

struct RunResult {
    std::string optimizer;
    std::string objective;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<RunRecord> records;
    std::vector<ExpansionRecord> expansions;
    TimingBreakdown timing;
    /// Set when the run stopped early on a degenerate cell.
    bool truncated = false;
    std::optional<double> known_best;
    /// Final leaves of a tree search, when requested.
    std::vector<Cell> leaves;
};

[[nodiscard]] std::string trace_header(std::size_t dim);
void write_trace_csv(std::ostream& os, const std::vector<RunRecord>& records, std::size_t dim);
[[nodiscard]] std::vector<RunRecord> read_trace_csv(std::istream& is);

/// Fills simple_regret = f* − max_{i≤n} f(x_i) and cum_regret = Σ (f* − f(x_i)).
/// Throws DataIntegrityError when a value exceeds f* by more than 1e−9.
void compute_regret(std::vector<RunRecord>& records, double f_star);

/// Best value among the first `n` records (all if n exceeds the trace).
[[nodiscard]] double best_after(const std::vector<RunRecord>& records, std::size_t n);

/// Best value among records with elapsed_ns ≤ t; nullopt before the first one.
[[nodiscard]] std::optional<double> best_at_time(const std::vector<RunRecord>& records, std::int64_t t);

}  // namespace gpoo
