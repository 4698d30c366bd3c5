#include "gpoo/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gpoo/oo_engine.hpp"
#include "gpoo/partition.hpp"

namespace gpoo {

void CompensatedSum::add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
        comp_ += (sum_ - t) + v;
    } else {
        comp_ += (v - t) + sum_;
    }
    sum_ = t;
}

double harmonic_number(std::size_t N) {
    CompensatedSum s;
    for (std::size_t n = N; n >= 1; --n) s.add(1.0 / static_cast<double>(n));
    return s.value();
}

std::size_t floor_log2(std::size_t n) {
    if (n == 0) throw std::invalid_argument("floor_log2: n must be >= 1");
    return static_cast<std::size_t>(std::bit_width(n) - 1);
}

DeviationResult deviation_mc(const KernelSpec& spec, const Point& x, const Point& y, double u, std::size_t trials,
                             std::uint64_t seed) {
    if (trials < 1000) throw std::invalid_argument("deviation_mc: at least 1000 trials");
    if (!(u >= 0.0)) throw std::invalid_argument("deviation_mc: u must be >= 0");
    DeviationResult r;
    r.trials = trials;
    r.distance = canonical_metric(spec, x, y);
    const double d = r.distance;
    if (d == 0.0) {
        r.bound = u > 0.0 ? 0.0 : 2.0;
        r.exact = u > 0.0 ? 0.0 : 1.0;
        r.exceedances = u > 0.0 ? 0 : trials;
        r.empirical = static_cast<double>(r.exceedances) / static_cast<double>(trials);
        return r;
    }
    r.bound = 2.0 * std::exp(-u * u / (2.0 * d * d));
    r.exact = std::erfc(u / (d * std::sqrt(2.0)));

    const double kxx = kernel_eval(spec, x, x);
    const double kyy = kernel_eval(spec, y, y);
    const double kxy = kernel_eval(spec, x, y);
    const double a = std::sqrt(std::max(kxx, 0.0));
    const double b = a > 0.0 ? kxy / a : 0.0;
    const double c = std::sqrt(std::max(kyy - b * b, 0.0));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t t = 0; t < trials; ++t) {
        const double z1 = gauss(rng);
        const double z2 = gauss(rng);
        const double fx = a * z1;
        const double fy = b * z1 + c * z2;
        if (std::abs(fx - fy) >= u) ++r.exceedances;
    }
    r.empirical = static_cast<double>(r.exceedances) / static_cast<double>(trials);
    return r;
}

RegretSeries regret_series(const std::function<double(std::size_t)>& delta, std::size_t N) {
    if (N < 1) throw std::invalid_argument("regret_series: N must be >= 1");
    RegretSeries s;
    s.N = N;
    s.terms.reserve(N);
    s.partial.reserve(N);
    CompensatedSum sum, h;
    for (std::size_t n = 1; n <= N; ++n) {
        const double t = delta(floor_log2(n));
        s.terms.push_back(t);
        sum.add(t);
        s.partial.push_back(sum.value());
        h.add(1.0 / static_cast<double>(n));
    }
    s.harmonic = h.value();
    return s;
}

double prop1_bound(const RegretSeries& series, double beta_max) {
    if (!(beta_max >= 0.0)) throw std::invalid_argument("prop1_bound: beta must be >= 0");
    if (series.partial.empty()) throw std::invalid_argument("prop1_bound: empty series");
    return std::sqrt(beta_max) * series.partial.back();
}

SeriesCheck prop2_check(const MetricAssumption& a, std::size_t N) {
    if (!a.series_admissible()) throw std::invalid_argument("prop2_check: requires m/alpha > 1");
    if (N < 1) throw std::invalid_argument("prop2_check: N must be >= 1");
    const double m = static_cast<double>(a.m);
    const double head = a.C * std::pow(2.0 * std::sqrt(m), a.alpha);

    // Terms are constant on each dyadic block [2^h, 2^{h+1}).
    CompensatedSum lhs;
    for (std::size_t h = 0; (std::size_t{1} << h) <= N; ++h) {
        const std::size_t first = std::size_t{1} << h;
        const std::size_t last = std::min(N, (first << 1) - 1);
        lhs.add(static_cast<double>(last - first + 1) * lemma3_bound(a, h));
    }
    const double c1 = head * std::exp2(a.alpha / m);
    const double Nd = static_cast<double>(N);
    const double rhs = c1 * std::pow(Nd, 1.0 - a.alpha / m) * std::pow(harmonic_number(N), a.alpha / m);
    return {lhs.value(), rhs};
}

bool regret_guard_holds(const RunResult& run, double slack) {
    if (!run.known_best) throw std::invalid_argument("regret guard: run lacks a known optimum");
    const double f_star = *run.known_best;
    return std::all_of(run.expansions.begin(), run.expansions.end(), [&](const ExpansionRecord& e) {
        return f_star - e.best_before <= std::sqrt(e.beta) * e.delta + slack;
    });
}

GuardReport empirical_regret_guard(const std::vector<RunResult>& runs, double epsilon) {
    if (runs.empty()) throw std::invalid_argument("empirical_regret_guard: no runs");
    GuardReport g;
    g.runs = runs.size();
    for (const auto& r : runs) g.holding += regret_guard_holds(r) ? 1 : 0;
    g.fraction = static_cast<double>(g.holding) / static_cast<double>(g.runs);
    g.threshold = 1.0 - epsilon - 0.05;
    return g;
}

HolderReport hoelder_harmonic_selfcheck(std::size_t N, double p, double q, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("hoelder: N must be >= 1");
    if (!(p >= 1.0 && q >= 1.0) || std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12) {
        throw std::invalid_argument("hoelder: need p, q >= 1 with 1/p + 1/q = 1");
    }
    HolderReport rep;
    CompensatedSum lhs;
    for (std::size_t n = 1; n <= N; ++n) lhs.add(std::pow(static_cast<double>(n), -1.0 / q));
    const double H = harmonic_number(N);
    rep.proof_sequence = {lhs.value(), std::pow(static_cast<double>(N), 1.0 / p) * std::pow(H, 1.0 / q)};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        CompensatedSum ab, ap, bq;
        for (std::size_t n = 0; n < N; ++n) {
            const double a = unif(rng), b = unif(rng);
            ab.add(std::abs(a * b));
            ap.add(std::pow(std::abs(a), p));
            bq.add(std::pow(std::abs(b), q));
        }
        const double rhs = std::pow(ap.value(), 1.0 / p) * std::pow(bq.value(), 1.0 / q);
        if (ab.value() > rhs * (1.0 + 1e-12)) rep.random_sequences = false;
    }

    if (N >= 1000) {
        const double ln = std::log(static_cast<double>(N));
        const double ratio = H / ln;
        rep.harmonic_window = ratio >= 1.0 && ratio <= 1.0 + 1.0 / ln + 0.01;
    }
    return rep;
}

void to_json(nlohmann::json& j, const TheoryCheck& c) {
    j = nlohmann::json{{"check", c.check}, {"lhs", c.lhs},       {"rhs", c.rhs},
                       {"pass", c.pass},   {"trials", c.trials}, {"seed", c.seed}};
}

namespace {

Point uniform_point(std::mt19937_64& rng, std::size_t m) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Point p(static_cast<Eigen::Index>(m));
    for (Eigen::Index j = 0; j < p.size(); ++j) p[j] = unif(rng);
    return p;
}

TheoryCheck check_envelope(const KernelSpec& spec, const std::string& name, std::uint64_t seed) {
    constexpr std::size_t m = 3, pairs = 10'000;
    const MetricAssumption a = metric_envelope(spec, m);
    std::mt19937_64 rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pairs; ++i) {
        const Point x = uniform_point(rng, m), y = uniform_point(rng, m);
        worst = std::max(worst, canonical_metric(spec, x, y) - a.C * std::pow((x - y).norm(), a.alpha));
    }
    return {name, worst, 1e-9, worst <= 1e-9, pairs, seed};
}

TheoryCheck check_deviation(std::uint64_t seed) {
    constexpr std::size_t trials = 10'000;
    std::mt19937_64 rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t cases = 0;
    for (const KernelSpec& spec : {KernelSpec::squared_exponential(0.1), KernelSpec::matern(MaternNu::ThreeHalves, 0.1)}) {
        for (int pair = 0; pair < 10; ++pair) {
            const Point x = uniform_point(rng, 3);
            const Point y = x + 0.2 * (uniform_point(rng, 3) - Point::Constant(3, 0.5));
            const double d = canonical_metric(spec, x, y);
            for (double f : {0.25, 0.5, 1.0, 2.0}) {
                const auto r = deviation_mc(spec, x, y, f * d, trials, rng());
                const double sigma = std::sqrt(r.empirical * (1.0 - r.empirical) / static_cast<double>(trials));
                worst = std::max(worst, r.empirical - r.bound - 3.0 * sigma);
                ++cases;
            }
        }
    }
    return {"deviation", worst, 0.0, worst <= 0.0, cases * trials, seed};
}

TheoryCheck check_lemma3() {
    constexpr std::size_t depth = 12;
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t cells = 0;
    for (std::size_t m = 1; m <= 3; ++m) {
        std::vector<std::pair<PseudoMetric, MetricAssumption>> metrics;
        metrics.emplace_back(PseudoMetric::power_euclidean(1.0, 1.0), MetricAssumption{1.0, 1.0, m});
        for (const KernelSpec& s : {KernelSpec::squared_exponential(0.1), KernelSpec::matern(MaternNu::Half, 0.1),
                                    KernelSpec::matern(MaternNu::ThreeHalves, 0.1),
                                    KernelSpec::matern(MaternNu::FiveHalves, 0.1)}) {
            metrics.emplace_back(PseudoMetric::canonical(s), metric_envelope(s, m));
        }
        const PartitionScheme scheme;
        for (const auto& [metric, a] : metrics) {
            std::vector<Cell> level{make_root(Box::unit(m), metric, scheme)};
            for (std::size_t h = 0; h <= depth; ++h) {
                std::vector<Cell> next;
                for (const Cell& c : level) {
                    worst = std::max(worst, c.delta - lemma3_bound(a, h));
                    ++cells;
                    if (h < depth) {
                        auto [l, r] = split_regular(c, metric);
                        next.push_back(std::move(l));
                        next.push_back(std::move(r));
                    }
                }
                level = std::move(next);
            }
        }
    }
    return {"lemma3", worst, 1e-9, worst <= 1e-9, cells, 0};
}

TheoryCheck check_prop1() {
    const MetricAssumption a{std::sqrt(20.0), 1.0, 3};
    const std::size_t N = 1000;
    const double fast = prop1_bound(regret_series([&](std::size_t h) { return lemma3_bound(a, h); }, N), 1.0);
    long double direct = 0.0L;
    for (std::size_t n = 1; n <= N; ++n) {
        const auto h = static_cast<long double>(floor_log2(n));
        direct += static_cast<long double>(a.C) * 2.0L * std::sqrt(3.0L) * std::exp2(-h / 3.0L);
    }
    const double ref = static_cast<double>(direct);
    return {"prop1", fast, ref, std::abs(fast - ref) <= 1e-9 * ref, N, 0};
}

TheoryCheck check_prop2() {
    double worst_ratio = 0.0;
    std::size_t cases = 0;
    for (std::size_t m : {1, 2, 3, 5, 10}) {
        for (double alpha : {0.5, 1.0}) {
            const MetricAssumption a{1.0, alpha, m};
            if (!a.series_admissible()) continue;
            for (std::size_t k = 0; k <= 17; ++k) {
                const auto c = prop2_check(a, std::size_t{1} << k);
                worst_ratio = std::max(worst_ratio, c.lhs / c.rhs);
                ++cases;
            }
        }
    }
    bool decreasing = true;
    for (std::size_t m : {1, 2, 3, 5, 10}) {
        for (double alpha : {0.5, 1.0}) {
            const MetricAssumption a{1.0, alpha, m};
            if (!a.series_admissible()) continue;
            double prev = std::numeric_limits<double>::infinity();
            for (std::size_t N : {1000, 10'000, 100'000}) {
                const double avg = prop2_check(a, N).lhs / static_cast<double>(N);
                decreasing = decreasing && avg < prev;
                prev = avg;
            }
        }
    }
    return {"prop2", worst_ratio, 1.0, worst_ratio <= 1.0 && decreasing, cases, 0};
}

TheoryCheck check_hoelder(std::uint64_t seed) {
    bool ok = true;
    SeriesCheck shown;
    for (double q : {2.0, 3.0, 6.0, 20.0}) {
        const double p = q / (q - 1.0);
        const auto r = hoelder_harmonic_selfcheck(10'000, p, q, seed);
        ok = ok && r.pass();
        if (q == 3.0) shown = r.proof_sequence;
    }
    return {"hoelder", shown.lhs, shown.rhs, ok, 100, seed};
}

TheoryCheck check_regret_guard(std::uint64_t seed) {
    constexpr std::size_t runs = 200, budget = 2000, resolution = 21;
    constexpr double eps = 0.01;
    const KernelSpec spec = KernelSpec::squared_exponential(0.1);
    std::vector<RunResult> results;
    for (std::size_t i = 0; i < runs; ++i) {
        Objective obj = on_model_objective(spec, Box::unit(3), resolution, seed + i);
        const TensorGrid grid(obj.domain, resolution);
        GpooConfig cfg{spec, {}, {}};
        cfg.beta.mode = BetaMode::Theory;
        cfg.beta.horizon = budget;
        cfg.beta.epsilon = eps;
        cfg.beta.cell_count = [grid](const Cell& c) { return static_cast<double>(grid.count_inside(c.box)); };
        cfg.options.budget = budget;
        results.push_back(run_gpoo(obj, cfg));
    }
    const auto g = empirical_regret_guard(results, eps);
    return {"regret_guard", g.fraction, g.threshold, g.pass(), runs, seed};
}

}  // namespace

const std::vector<std::string>& theory_check_names() {
    static const std::vector<std::string> names = {"envelope_se", "envelope_matern", "deviation", "lemma3",
                                                   "prop1",       "prop2",           "hoelder",   "regret_guard"};
    return names;
}

std::vector<TheoryCheck> verify_theory(const std::string& name, std::uint64_t seed) {
    const auto& names = theory_check_names();
    if (!name.empty() && std::find(names.begin(), names.end(), name) == names.end()) {
        throw std::invalid_argument("unknown theory check '" + name + "'");
    }
    std::vector<TheoryCheck> out;
    auto want = [&](const char* n) { return name.empty() || name == n; };
    if (want("envelope_se")) out.push_back(check_envelope(KernelSpec::squared_exponential(0.1), "envelope_se", seed));
    if (want("envelope_matern")) {
        out.push_back(check_envelope(KernelSpec::matern(MaternNu::ThreeHalves, 0.1), "envelope_matern", seed));
    }
    if (want("deviation")) out.push_back(check_deviation(seed));
    if (want("lemma3")) out.push_back(check_lemma3());
    if (want("prop1")) out.push_back(check_prop1());
    if (want("prop2")) out.push_back(check_prop2());
    if (want("hoelder")) out.push_back(check_hoelder(seed));
    if (want("regret_guard")) out.push_back(check_regret_guard(seed));
    return out;
}

}  // namespace gpoo
