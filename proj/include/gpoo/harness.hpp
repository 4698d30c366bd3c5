#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpoo/baselines.hpp"
#include "gpoo/oo_engine.hpp"
#include "gpoo/trace.hpp"

namespace gpoo {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Flat key/value document. Lines are `key = value`; `#` starts a comment.
class ConfigMap {
public:
    [[nodiscard]] static ConfigMap parse(const std::string& text);
    [[nodiscard]] static ConfigMap load(const std::filesystem::path& path);

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
    [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
    [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

    /// Sorted `key = value` lines.
    [[nodiscard]] std::string canonical() const;

private:
    std::map<std::string, std::string> values_;
};

/// 64-bit FNV-1a of the canonical form, as 16 hex digits.
[[nodiscard]] std::string config_hash(const ConfigMap& config);

enum class Optimizer { Gpoo, Gpucb, Random };

[[nodiscard]] std::string_view optimizer_name(Optimizer o);
[[nodiscard]] Optimizer optimizer_from_name(std::string_view name);

struct ExperimentConfig {
    std::vector<Optimizer> optimizers{Optimizer::Gpoo};
    /// "on_model" or a benchmark name.
    std::string objective = "on_model";
    bool subsample = false;
    KernelSpec kernel = KernelSpec::squared_exponential(0.1);
    Box domain = Box::unit(3);
    std::size_t grid_resolution = 21;
    std::size_t budget = 300;
    double epsilon = 0.01;

    BetaMode beta_mode = BetaMode::Experiment;
    double beta_value = 1.0;
    std::size_t beta_horizon = 10'000;
    double beta_cell_count = 1.0;
    PartitionScheme partition;

    std::size_t ucb_grid_resolution = 21;
    std::optional<double> ucb_beta_count = 1.0;
    std::optional<double> ucb_beta;
    double ucb_noise = 0.001;
    bool ucb_variance_form = false;
    std::size_t ucb_budget = 500;

    std::optional<std::size_t> gpoo_budget;
    std::optional<std::size_t> random_budget;

    double cost = 0.0;
    std::vector<std::uint64_t> seeds{0};
    ClockMode clock = ClockMode::Virtual;
    double ns_per_op = RunClock::kDefaultNsPerOp;
    std::filesystem::path out = "gpoo_out";
    std::size_t workers = 1;

    /// Resolved key/value form (every field present); its hash identifies the experiment.
    [[nodiscard]] ConfigMap to_map() const;
    [[nodiscard]] std::string hash() const { return config_hash(to_map()); }
};

/// Defaults for unset keys; benchmark objectives pick up the table row.
/// The output root defaults to $GPOO_OUT when set.
[[nodiscard]] ExperimentConfig resolve_config(const ConfigMap& map);

/// The objective a given seed runs on.
[[nodiscard]] Objective make_objective(const ExperimentConfig& config, std::uint64_t seed);

[[nodiscard]] RunResult run_single(const ExperimentConfig& config, Optimizer optimizer, std::uint64_t seed);

struct RunStatus {
    Optimizer optimizer = Optimizer::Gpoo;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::filesystem::path trace;
};

struct AggregateRow {
    std::string optimizer;
    std::string objective;
    std::string stat;
    std::string x_axis;
    double x = 0.0;
    double value = 0.0;
};

struct ExperimentSummary {
    std::vector<RunResult> runs;
    std::vector<RunStatus> status;
    std::vector<AggregateRow> aggregate;
    std::string config_hash;

    [[nodiscard]] std::size_t failures() const;
    /// 0 all ok, 1 some run failed.
    [[nodiscard]] int exit_code() const { return failures() == 0 ? 0 : 1; }
};

/// Every (seed × optimizer) run. Writes traces/, manifest.csv, aggregate.csv,
/// timing.json and config.resolved under config.out when `write` is set.
[[nodiscard]] ExperimentSummary run_experiment(const ExperimentConfig& config, bool write = true);

/// Median and quartiles of simple regret against evaluations and against time (seconds).
[[nodiscard]] std::vector<AggregateRow> aggregate_runs(const std::vector<RunResult>& runs);

/// Aggregate rebuilt from manifest.csv and the trace files in `dir`.
[[nodiscard]] std::vector<AggregateRow> aggregate_from_disk(const std::filesystem::path& dir);

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows);

/// Linear-interpolation quantile of unsorted data.
[[nodiscard]] double quantile(std::vector<double> values, double q);

/// Median simple regret of a set of runs after n evaluations.
[[nodiscard]] double median_regret_at_step(const std::vector<RunResult>& runs, std::size_t n);
/// Median simple regret at time t (ns); runs with no evaluation yet count as +inf.
[[nodiscard]] double median_regret_at_time(const std::vector<RunResult>& runs, std::int64_t t);

/// One level of a one-parameter sweep.
struct SweepResult {
    double value = 0.0;
    ExperimentSummary summary;
};

/// run_experiment once per cost into out/cost_<c>/ plus out/sweep.csv. Requires the virtual clock.
[[nodiscard]] std::vector<SweepResult> sweep_costs(const ExperimentConfig& base, const std::vector<double>& costs,
                                                   bool write = true);

/// run_experiment once per GP-UCB β count |X̂| into out/count_<n>/ plus out/sweep.csv.
[[nodiscard]] std::vector<SweepResult> sweep_beta_count(const ExperimentConfig& base, const std::vector<double>& counts,
                                                        bool write = true);

/// Least-squares slope of log(time) against log(n) for steps n ∈ [lo, hi].
[[nodiscard]] double step_time_exponent(const std::vector<RunRecord>& records, std::size_t lo, std::size_t hi);

/// Cells of the final GP-OO search tree for the first seed.
[[nodiscard]] std::vector<Cell> partition_dump(const ExperimentConfig& config);

}  // namespace gpoo
