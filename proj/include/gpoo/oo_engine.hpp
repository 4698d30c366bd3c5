#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gpoo/clock.hpp"
#include "gpoo/objectives.hpp"
#include "gpoo/partition.hpp"
#include "gpoo/trace.hpp"

namespace gpoo {

/// A leaf of the search tree: its cell, the value at the cell center and the
/// optimistic bound U = f_center + exploration.
struct TreeNode {
    Cell cell;
    double f_center = 0.0;
    double beta = 0.0;
    double exploration = 0.0;
    double utility = 0.0;
    std::size_t eval_index = 0;
};

/// δ(t) for generic optimistic optimization.
class DiameterSchedule {
public:
    explicit DiameterSchedule(std::function<double(std::size_t)> delta);

    /// δ(t) = delta0 · rate^t, rate ∈ (0, 1].
    static DiameterSchedule geometric(double delta0, double rate);
    /// δ(t) = the depth-t cell bound C(2√m)^α 2^(−αt/m).
    static DiameterSchedule from_assumption(const MetricAssumption& a);

    [[nodiscard]] double operator()(std::size_t depth) const;

private:
    std::function<double(std::size_t)> delta_;
};

enum class BetaMode { Theory, Experiment, Fixed };

[[nodiscard]] std::string_view beta_mode_name(BetaMode mode);
[[nodiscard]] BetaMode beta_mode_from_name(std::string_view name);

/// Confidence scaling per cell.
///   Theory      2 log(2 |X_n| N / ε)
///   Experiment  2 log(|X̂_n| N / (2ε))
///   Fixed       a constant
/// |X_n| comes from `cell_count`, floored at 1; without one it is 1.
struct BetaSchedule {
    BetaMode mode = BetaMode::Experiment;
    std::size_t horizon = 10'000;
    double epsilon = 0.01;
    double value = 1.0;
    std::function<double(const Cell&)> cell_count;

    void validate() const;
};

[[nodiscard]] double beta_n(const BetaSchedule& schedule, const Cell& cell);

/// Exploration term for a freshly created child.
struct Exploration {
    double beta = 0.0;
    double term = 0.0;
};
using ExploreFn = std::function<Exploration(const Cell&)>;

/// f + δ(depth).
[[nodiscard]] ExploreFn schedule_exploration(DiameterSchedule schedule);
/// f + β_n^{1/2} Δ(cell).
[[nodiscard]] ExploreFn gp_exploration(BetaSchedule schedule);

/// Max-heap of leaves ordered by U, then depth (deeper first), then node id (lower first).
class SearchTree {
public:
    SearchTree() = default;

    /// True when `a` should be expanded before `b`.
    [[nodiscard]] static bool precedes(const TreeNode& a, const TreeNode& b);

    void push(TreeNode node);
    [[nodiscard]] TreeNode pop();
    [[nodiscard]] const TreeNode& top() const;
    [[nodiscard]] bool empty() const { return heap_.empty(); }
    [[nodiscard]] std::size_t size() const { return heap_.size(); }
    [[nodiscard]] const std::vector<TreeNode>& leaves() const { return heap_; }

private:
    std::vector<TreeNode> heap_;
};

/// Mutable state of one run besides the tree.
struct SearchState {
    SearchTree tree;
    std::vector<RunRecord> records;
    std::vector<ExpansionRecord> expansions;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
};

struct StepResult {
    TreeNode expanded;
    TreeNode left;
    TreeNode right;
};

/// Pop the best leaf, split it, evaluate both child centers, push the children.
[[nodiscard]] StepResult oo_step(SearchState& state, const Objective& objective, const PseudoMetric& metric,
                                 const PartitionScheme& scheme, const ExploreFn& explore, RunClock& clock);

struct OoOptions {
    PartitionScheme scheme;
    std::size_t budget = 100;
    ClockMode clock = ClockMode::Virtual;
    double ns_per_op = RunClock::kDefaultNsPerOp;
    bool keep_leaves = false;
};

/// Evaluate the root center, then step until `budget` evaluations (may end at budget + 1).
[[nodiscard]] RunResult run_oo(const Objective& objective, const PseudoMetric& metric, const ExploreFn& explore,
                               const OoOptions& options);

struct GpooConfig {
    KernelSpec kernel;
    BetaSchedule beta;
    OoOptions options;
};

[[nodiscard]] RunResult run_gpoo(const Objective& objective, const GpooConfig& config);

/// Modeled work of one split, for the virtual clock.
[[nodiscard]] double split_ops(const PartitionScheme& scheme, std::size_t dim, bool corner_diameters);

}  // namespace gpoo
