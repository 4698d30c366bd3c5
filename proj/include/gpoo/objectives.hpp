#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gpoo/clock.hpp"
#include "gpoo/geometry.hpp"
#include "gpoo/gp.hpp"
#include "gpoo/kernel.hpp"

namespace gpoo {

/// A function to be maximized on a box.
///
/// Benchmarks from the minimization literature are stored negated, so
/// `known_best` is −(documented minimum) and `known_argmax` the documented
/// minimizer.
struct Objective {
    std::string name;
    Box domain;
    std::function<double(const Point&)> fn;
    std::optional<double> known_best;
    std::optional<Point> known_argmax;
    /// Artificial per-evaluation cost in seconds.
    double cost = 0.0;
    /// Modeled work of one call, charged to the virtual clock.
    double eval_ops = 0.0;

    [[nodiscard]] double operator()(const Point& x) const { return fn(x); }
};

/// Raised when an objective throws or returns NaN. Carries the point.
struct EvaluationError : std::runtime_error {
    EvaluationError(const std::string& what, Point at) : std::runtime_error(what), x(std::move(at)) {}
    Point x;
};

/// Evaluate with cost accounting. Failures are rethrown as EvaluationError.
[[nodiscard]] double evaluate(const Objective& obj, const Point& x, RunClock& clock);

/// Same objective with an extra per-evaluation cost of c seconds.
[[nodiscard]] Objective with_cost(Objective obj, double c);

/// −g, with the optimum bookkeeping mirrored.
[[nodiscard]] Objective negated(Objective obj);

/// One row of the hyperparameter table for the benchmark suite.
struct BenchmarkEntry {
    std::string name;
    Box domain;
    double lengthscale = 1.0;
    double beta_ucb = 1.0;
    double beta_oo = 1.0;
    /// Documented minimum of the unnegated function and one minimizer.
    double minimum = 0.0;
    Point argmin;
};

struct UnknownNameError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The 12 rows in table order.
[[nodiscard]] const std::vector<BenchmarkEntry>& benchmark_table();
[[nodiscard]] const BenchmarkEntry& benchmark_entry(std::string_view name);

/// The unnegated closed form of a benchmark (minimization convention).
[[nodiscard]] double benchmark_raw(std::string_view name, const Point& x);

/// Benchmark as a maximization objective on `domain` (table domain by default).
[[nodiscard]] Objective benchmark(std::string_view name, std::optional<Box> domain = std::nullopt);

/// Kernel used for benchmark runs: Matérn 3/2 with the table lengthscale.
[[nodiscard]] KernelSpec benchmark_kernel(const BenchmarkEntry& entry);

/// Random sub-box that keeps the minimizer: per axis lower ~ U(lo, x*_j), upper ~ U(x*_j, hi).
[[nodiscard]] Box subsample_domain(const BenchmarkEntry& entry, std::uint64_t seed);

/// GP prior sample on a resolution^m tensor grid, extended by nearest grid point.
/// known_best is the grid maximum and known_argmax its location.
[[nodiscard]] Objective on_model_objective(const KernelSpec& spec, const Box& domain, std::size_t resolution,
                                           std::uint64_t seed);

/// Objective backed by an existing sample.
[[nodiscard]] Objective sample_objective(std::shared_ptr<const GpSample> sample, const Box& domain);

/// (min, max) of the objective over a resolution^m grid on its domain.
[[nodiscard]] std::pair<double, double> grid_range(const Objective& obj, std::size_t resolution);

/// Registry rows as CSV: name,dim,lower,upper,lengthscale,beta_ucb,beta_oo.
[[nodiscard]] std::string registry_csv();

}  // namespace gpoo
