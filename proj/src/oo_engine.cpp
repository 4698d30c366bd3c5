#include "gpoo/oo_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gpoo {

namespace {

// Work units measured on the reference machine (1 unit ≈ 1 ns).
constexpr double kMetricOps = 45.0;
constexpr double kSplitFixedOps = 1200.0;
constexpr double kHeapOpsPerLevel = 24.0;
constexpr double kBookkeepingOps = 200.0;

double heap_ops(std::size_t size) { return kHeapOpsPerLevel * (std::log2(static_cast<double>(size) + 1.0) + 1.0); }

double ipow(double base, std::size_t e) {
    double r = 1.0;
    for (std::size_t i = 0; i < e; ++i) r *= base;
    return r;
}

bool heap_less(const TreeNode& a, const TreeNode& b) { return SearchTree::precedes(b, a); }

TreeNode make_node(Cell cell, double f, const ExploreFn& explore, std::size_t eval_index) {
    const Exploration e = explore(cell);
    TreeNode n;
    n.cell = std::move(cell);
    n.f_center = f;
    n.beta = e.beta;
    n.exploration = e.term;
    n.utility = f + e.term;
    n.eval_index = eval_index;
    return n;
}

void record(SearchState& state, const TreeNode& node, const RunClock& clock) {
    RunRecord r;
    r.step = state.evaluations;
    r.x = node.cell.center;
    r.f_value = node.f_center;
    r.delta = node.cell.delta;
    r.beta = node.beta;
    r.utility = node.utility;
    r.best_value = state.best;
    r.elapsed_ns = clock.elapsed_ns();
    state.records.push_back(std::move(r));
}

}  // namespace

DiameterSchedule::DiameterSchedule(std::function<double(std::size_t)> delta) : delta_(std::move(delta)) {
    if (!delta_) throw std::invalid_argument("DiameterSchedule: empty function");
}

DiameterSchedule DiameterSchedule::geometric(double delta0, double rate) {
    if (!(delta0 >= 0.0) || !(rate > 0.0 && rate <= 1.0)) {
        throw std::invalid_argument("DiameterSchedule::geometric: need delta0 >= 0 and rate in (0, 1]");
    }
    return DiameterSchedule([=](std::size_t t) { return delta0 * std::pow(rate, static_cast<double>(t)); });
}

DiameterSchedule DiameterSchedule::from_assumption(const MetricAssumption& a) {
    return DiameterSchedule([a](std::size_t t) { return lemma3_bound(a, t); });
}

double DiameterSchedule::operator()(std::size_t depth) const { return delta_(depth); }

std::string_view beta_mode_name(BetaMode mode) {
    switch (mode) {
        case BetaMode::Theory: return "theory";
        case BetaMode::Experiment: return "experiment";
        case BetaMode::Fixed: return "fixed";
    }
    return "?";
}

BetaMode beta_mode_from_name(std::string_view name) {
    if (name == "theory") return BetaMode::Theory;
    if (name == "experiment") return BetaMode::Experiment;
    if (name == "fixed") return BetaMode::Fixed;
    throw std::invalid_argument("unknown beta mode '" + std::string(name) + "' (expected theory|experiment|fixed)");
}

void BetaSchedule::validate() const {
    if (mode == BetaMode::Fixed) {
        if (!(value >= 0.0)) throw std::invalid_argument("BetaSchedule: fixed beta must be >= 0");
        return;
    }
    if (horizon < 1) throw std::invalid_argument("BetaSchedule: horizon must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("BetaSchedule: epsilon must lie in (0, 1)");
    if (mode == BetaMode::Experiment && static_cast<double>(horizon) / (2.0 * epsilon) <= 1.0) {
        throw std::invalid_argument("BetaSchedule: N/(2 epsilon) must exceed 1 for a positive beta");
    }
}

double beta_n(const BetaSchedule& schedule, const Cell& cell) {
    if (schedule.mode == BetaMode::Fixed) return schedule.value;
    const double count = schedule.cell_count ? std::max(1.0, schedule.cell_count(cell)) : 1.0;
    const double N = static_cast<double>(schedule.horizon);
    if (schedule.mode == BetaMode::Theory) return 2.0 * std::log(2.0 * count * N / schedule.epsilon);
    return 2.0 * std::log(count * N / (2.0 * schedule.epsilon));
}

ExploreFn schedule_exploration(DiameterSchedule schedule) {
    return [schedule = std::move(schedule)](const Cell& cell) {
        return Exploration{1.0, schedule(cell.depth())};
    };
}

ExploreFn gp_exploration(BetaSchedule schedule) {
    schedule.validate();
    return [schedule = std::move(schedule)](const Cell& cell) {
        const double b = beta_n(schedule, cell);
        return Exploration{b, std::sqrt(b) * cell.delta};
    };
}

bool SearchTree::precedes(const TreeNode& a, const TreeNode& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    if (a.cell.depth() != b.cell.depth()) return a.cell.depth() > b.cell.depth();
    return a.cell.id < b.cell.id;
}

void SearchTree::push(TreeNode node) {
    heap_.push_back(std::move(node));
    std::push_heap(heap_.begin(), heap_.end(), heap_less);
}

TreeNode SearchTree::pop() {
    if (heap_.empty()) throw std::logic_error("SearchTree::pop on empty tree");
    std::pop_heap(heap_.begin(), heap_.end(), heap_less);
    TreeNode n = std::move(heap_.back());
    heap_.pop_back();
    return n;
}

const TreeNode& SearchTree::top() const {
    if (heap_.empty()) throw std::logic_error("SearchTree::top on empty tree");
    return heap_.front();
}

double split_ops(const PartitionScheme& scheme, std::size_t dim, bool corner_diameters) {
    const double m = static_cast<double>(dim);
    const double grid = ipow(static_cast<double>(scheme.resolution), dim);
    if (scheme.mode == SplitMode::RegularLongestSide) {
        const double per_child = corner_diameters ? ipow(2.0, dim) : grid;
        return 2.0 * per_child * kMetricOps + kSplitFixedOps + 10.0 * m;
    }
    const double cuts = m * static_cast<double>(scheme.resolution);
    return cuts * 2.0 * (grid + 1.0) * grid * kMetricOps + kSplitFixedOps;
}

StepResult oo_step(SearchState& state, const Objective& objective, const PseudoMetric& metric,
                   const PartitionScheme& scheme, const ExploreFn& explore, RunClock& clock) {
    if (state.tree.empty()) throw std::logic_error("oo_step: empty tree");
    StepResult out;
    out.expanded = clock.charge(Component::Queue, heap_ops(state.tree.size()), [&] { return state.tree.pop(); });
    const TreeNode& e = out.expanded;
    state.expansions.push_back(
        {state.evaluations, e.cell.depth(), e.f_center, e.cell.delta, e.beta, e.utility, state.best});

    const bool corners = metric.euclidean_monotone();
    auto children = clock.charge(Component::Partition, split_ops(scheme, e.cell.box.dim(), corners),
                                 [&] { return split_cell(e.cell, metric, scheme); });

    TreeNode* slots[2] = {&out.left, &out.right};
    Cell* cells[2] = {&children.first, &children.second};
    for (int k = 0; k < 2; ++k) {
        const double y = evaluate(objective, cells[k]->center, clock);
        ++state.evaluations;
        state.best = std::max(state.best, y);
        *slots[k] = clock.charge(Component::Partition, kBookkeepingOps,
                                 [&] { return make_node(*cells[k], y, explore, state.evaluations); });
        record(state, *slots[k], clock);
    }
    for (TreeNode* s : slots) {
        clock.charge(Component::Queue, heap_ops(state.tree.size()), [&] { state.tree.push(*s); });
    }
    return out;
}

RunResult run_oo(const Objective& objective, const PseudoMetric& metric, const ExploreFn& explore,
                 const OoOptions& options) {
    if (options.budget < 1) throw std::invalid_argument("run_oo: budget must be >= 1");
    if (objective.domain.degenerate()) throw DomainError("run_oo: degenerate domain");
    options.scheme.validate();

    RunClock clock(options.clock, options.ns_per_op);
    const std::size_t m = objective.domain.dim();
    const double root_ops = (metric.euclidean_monotone() ? ipow(2.0, m) : ipow(static_cast<double>(options.scheme.resolution), m)) * kMetricOps;
    Cell root = clock.charge(Component::Partition, root_ops,
                             [&] { return make_root(objective.domain, metric, options.scheme); });

    SearchState state;
    const double y = evaluate(objective, root.center, clock);
    state.evaluations = 1;
    state.best = y;
    TreeNode node = make_node(std::move(root), y, explore, 1);
    record(state, node, clock);
    state.tree.push(std::move(node));

    RunResult result;
    result.objective = objective.name;
    while (state.evaluations < options.budget) {
        try {
            (void)oo_step(state, objective, metric, options.scheme, explore, clock);
        } catch (const DegenerateCellError&) {
            result.truncated = true;
            break;
        }
    }
    if (options.keep_leaves) {
        for (const auto& leaf : state.tree.leaves()) result.leaves.push_back(leaf.cell);
        std::sort(result.leaves.begin(), result.leaves.end(),
                  [](const Cell& a, const Cell& b) { return a.id < b.id; });
    }
    result.records = std::move(state.records);
    result.expansions = std::move(state.expansions);
    result.timing = clock.breakdown();
    result.known_best = objective.known_best;
    if (objective.known_best) compute_regret(result.records, *objective.known_best);
    return result;
}

RunResult run_gpoo(const Objective& objective, const GpooConfig& config) {
    config.kernel.validate();
    RunResult r = run_oo(objective, PseudoMetric::canonical(config.kernel), gp_exploration(config.beta), config.options);
    r.optimizer = "gpoo";
    return r;
}

}  // namespace gpoo
