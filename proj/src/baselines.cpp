#include "gpoo/baselines.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace gpoo {

namespace {

// Work units measured on the reference machine (1 unit ≈ 1 ns).
constexpr double kKernelOps = 15.0;
constexpr double kSolveOps = 0.135;

}  // namespace

void UcbConfig::validate() const {
    kernel.validate();
    if (grid.empty()) throw std::invalid_argument("UcbConfig: empty candidate set");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("UcbConfig: epsilon must lie in (0, 1)");
    if (!(noise >= 0.0)) throw std::invalid_argument("UcbConfig: noise must be >= 0");
    if (budget < 1) throw std::invalid_argument("UcbConfig: budget must be >= 1");
    if (budget > kMaxBudget) {
        throw std::invalid_argument("UcbConfig: budget " + std::to_string(budget) + " exceeds the dense-GP limit of " +
                                    std::to_string(kMaxBudget));
    }
    if (beta_count && !(*beta_count >= 1.0)) throw std::invalid_argument("UcbConfig: beta count must be >= 1");
    if (fixed_beta && !(*fixed_beta >= 0.0)) throw std::invalid_argument("UcbConfig: fixed beta must be >= 0");
}

double ucb_beta(const UcbConfig& config, std::size_t n) {
    if (config.fixed_beta) return *config.fixed_beta;
    const double count = config.beta_count ? *config.beta_count : static_cast<double>(config.grid.size());
    const double nn = static_cast<double>(n);
    return 2.0 * std::log(count * nn * nn * std::numbers::pi * std::numbers::pi / (6.0 * config.epsilon));
}

PointList ucb_grid(const Box& domain, std::size_t resolution) { return TensorGrid(domain, resolution).points(); }

RunResult run_gpucb(const Objective& objective, const UcbConfig& config) {
    config.validate();
    const std::size_t m = objective.domain.dim();
    for (const auto& g : config.grid) {
        if (static_cast<std::size_t>(g.size()) != m) throw DimensionError("run_gpucb: candidate dimension");
    }

    RunClock clock(config.clock, config.ns_per_op);
    const auto M = static_cast<Eigen::Index>(config.grid.size());
    const auto N = static_cast<Eigen::Index>(config.budget);

    Eigen::VectorXd prior_var(M);
    for (Eigen::Index i = 0; i < M; ++i) {
        const auto& g = config.grid[static_cast<std::size_t>(i)];
        prior_var[i] = kernel_eval(config.kernel, g, g);
    }
    Eigen::MatrixXd cross(M, N);
    std::vector<char> masked(static_cast<std::size_t>(M), 0);
    GpPosterior post(config.kernel, config.noise);
    Eigen::VectorXd mean, var;

    RunResult result;
    result.optimizer = "gpucb";
    result.objective = objective.name;
    double best = -std::numeric_limits<double>::infinity();

    for (Eigen::Index n = 0; n < N; ++n) {
        const double beta = ucb_beta(config, static_cast<std::size_t>(n + 1));
        const double root_beta = std::sqrt(beta);
        const double dm = static_cast<double>(M), dn = static_cast<double>(n);

        Eigen::Index pick = -1;
        double pick_a = -std::numeric_limits<double>::infinity();
        clock.charge(Component::Acquisition, dm * (kSolveOps * dn * dn + 2.0 * dn + 4.0), [&] {
            post.predict(cross.leftCols(n), prior_var, mean, var);
            for (Eigen::Index i = 0; i < M; ++i) {
                if (config.suppress_duplicates && masked[static_cast<std::size_t>(i)]) continue;
                const double explore = config.variance_form ? var[i] : std::sqrt(var[i]);
                const double a = mean[i] + root_beta * explore;
                if (a > pick_a) {
                    pick_a = a;
                    pick = i;
                }
            }
        });
        if (pick < 0) {
            result.truncated = true;
            break;
        }

        const Point& x = config.grid[static_cast<std::size_t>(pick)];
        const double y = evaluate(objective, x, clock);
        best = std::max(best, y);
        masked[static_cast<std::size_t>(pick)] = 1;

        clock.charge(Component::Posterior, (dn + 1.0) * (dn + 1.0) * 2.0 + (dn + 1.0) * kKernelOps, [&] {
            post.add_observation(x, y);
        });
        clock.charge(Component::Acquisition, dm * kKernelOps, [&] {
            for (Eigen::Index i = 0; i < M; ++i) cross(i, n) = kernel_eval(config.kernel, config.grid[static_cast<std::size_t>(i)], x);
        });

        RunRecord r;
        r.step = static_cast<std::size_t>(n + 1);
        r.x = x;
        r.f_value = y;
        r.delta = std::sqrt(var[pick]);
        r.beta = beta;
        r.utility = pick_a;
        r.best_value = best;
        r.elapsed_ns = clock.elapsed_ns();
        result.records.push_back(std::move(r));
    }

    result.timing = clock.breakdown();
    result.known_best = objective.known_best;
    if (objective.known_best) compute_regret(result.records, *objective.known_best);
    return result;
}

RunResult run_random(const Objective& objective, const RandomConfig& config) {
    if (config.budget < 1) throw std::invalid_argument("run_random: budget must be >= 1");
    RunClock clock(config.clock, config.ns_per_op);
    std::mt19937_64 rng(config.seed);
    const Box& box = objective.domain;
    const auto m = static_cast<Eigen::Index>(box.dim());

    RunResult result;
    result.optimizer = "random";
    result.objective = objective.name;
    result.seed = config.seed;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= config.budget; ++n) {
        Point x(m);
        clock.charge(Component::Acquisition, 10.0 * static_cast<double>(m), [&] {
            for (Eigen::Index j = 0; j < m; ++j) {
                x[j] = std::uniform_real_distribution<double>(box.lower[j], box.upper[j])(rng);
            }
        });
        const double y = evaluate(objective, x, clock);
        best = std::max(best, y);
        RunRecord r;
        r.step = n;
        r.x = std::move(x);
        r.f_value = y;
        r.best_value = best;
        r.elapsed_ns = clock.elapsed_ns();
        result.records.push_back(std::move(r));
    }
    result.timing = clock.breakdown();
    result.known_best = objective.known_best;
    if (objective.known_best) compute_regret(result.records, *objective.known_best);
    return result;
}

}  // namespace gpoo
