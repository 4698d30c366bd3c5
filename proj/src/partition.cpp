#include "gpoo/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gpoo/csv.hpp"

namespace gpoo {

namespace {

constexpr std::size_t kMaxGridPoints = 10'000'000;

std::size_t checked_grid_size(std::size_t resolution, std::size_t dim) {
    std::size_t total = 1;
    for (std::size_t a = 0; a < dim; ++a) {
        if (total > kMaxGridPoints / resolution) {
            throw std::length_error("diameter_grid: resolution^m exceeds 10^7 points");
        }
        total *= resolution;
    }
    return total;
}

// Calls fn(point) for every node of the resolution^m grid on the box.
template <typename Fn>
void for_each_grid_point(const Box& box, std::size_t resolution, Fn&& fn) {
    const std::size_t m = box.dim();
    const std::size_t total = checked_grid_size(resolution, m);
    std::vector<std::size_t> idx(m, 0);
    Point p = box.lower;
    const Point ext = box.extent();
    const double denom = static_cast<double>(resolution - 1);
    for (std::size_t n = 0; n < total; ++n) {
        for (std::size_t a = 0; a < m; ++a) {
            const auto j = static_cast<Eigen::Index>(a);
            p[j] = idx[a] + 1 == resolution ? box.upper[j] : box.lower[j] + ext[j] * (static_cast<double>(idx[a]) / denom);
        }
        fn(p);
        for (std::size_t a = m; a-- > 0;) {
            if (++idx[a] < resolution) break;
            idx[a] = 0;
        }
    }
}

PointList grid_points(const Box& box, std::size_t resolution) {
    PointList pts;
    for_each_grid_point(box, resolution, [&](const Point& p) { pts.push_back(p); });
    return pts;
}

struct ChildFit {
    Point center;
    double delta = 0.0;
};

ChildFit fit_child(const Box& box, const PseudoMetric& metric, std::size_t resolution) {
    PointList pts = grid_points(box, resolution);
    PointList candidates = pts;
    candidates.push_back(box.center());
    const auto [best, radius] = one_center(candidates, pts, metric);
    return {candidates[best], radius};
}

Cell make_child(const Box& box, NodeId id, Point center, double delta) {
    Cell c;
    c.box = box;
    c.id = std::move(id);
    c.center = std::move(center);
    c.delta = delta;
    return c;
}

}  // namespace

NodeId NodeId::child(std::uint64_t bit) const {
    NodeId out;
    out.depth_ = depth_ + 1;
    // offset' = 2·offset + bit
    out.offset_.resize(offset_.size());
    std::uint64_t carry = bit;
    for (std::size_t k = 0; k < offset_.size(); ++k) {
        const std::uint64_t limb = offset_[k];
        out.offset_[k] = (limb << 1) | carry;
        carry = limb >> 63;
    }
    if (carry != 0) out.offset_.push_back(carry);
    return out;
}

std::strong_ordering operator<=>(const NodeId& a, const NodeId& b) {
    if (auto c = a.depth_ <=> b.depth_; c != 0) return c;
    const std::size_t n = std::max(a.offset_.size(), b.offset_.size());
    for (std::size_t k = n; k-- > 0;) {
        const std::uint64_t la = k < a.offset_.size() ? a.offset_[k] : 0;
        const std::uint64_t lb = k < b.offset_.size() ? b.offset_[k] : 0;
        if (auto c = la <=> lb; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

std::string NodeId::index_string() const {
    // i = offset + 1, rendered by repeated division by 10^18.
    std::vector<std::uint64_t> limbs = offset_;
    std::uint64_t carry = 1;
    for (auto& limb : limbs) {
        const std::uint64_t before = limb;
        limb += carry;
        carry = limb < before ? 1 : 0;
        if (carry == 0) break;
    }
    if (carry != 0) limbs.push_back(carry);

    constexpr std::uint64_t kChunk = 1'000'000'000'000'000'000ULL;
    std::vector<std::uint64_t> chunks;
    auto is_zero = [&] { return std::all_of(limbs.begin(), limbs.end(), [](auto v) { return v == 0; }); };
    while (!is_zero()) {
        unsigned __int128 rem = 0;
        for (std::size_t k = limbs.size(); k-- > 0;) {
            const unsigned __int128 cur = (rem << 64) | limbs[k];
            limbs[k] = static_cast<std::uint64_t>(cur / kChunk);
            rem = cur % kChunk;
        }
        chunks.push_back(static_cast<std::uint64_t>(rem));
    }
    std::ostringstream os;
    os << chunks.back();
    for (std::size_t k = chunks.size() - 1; k-- > 0;) {
        std::string part = std::to_string(chunks[k]);
        os << std::string(18 - part.size(), '0') << part;
    }
    return os.str();
}

void PartitionScheme::validate() const {
    if (resolution < 2) throw InvalidSchemeError("partition scheme: grid resolution must be >= 2");
}

std::size_t longest_side(const Box& box) {
    const Point ext = box.extent();
    std::size_t best = 0;
    for (Eigen::Index j = 1; j < ext.size(); ++j) {
        if (ext[j] > ext[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(j);
    }
    return best;
}

std::pair<Box, Box> split_regular_boxes(const Box& box) {
    if (box.degenerate()) throw DegenerateCellError("split_regular: cell has zero extent in every dimension");
    const auto j = static_cast<Eigen::Index>(longest_side(box));
    const double mid = 0.5 * (box.lower[j] + box.upper[j]);
    Box left = box;
    Box right = box;
    left.upper[j] = mid;
    right.lower[j] = mid;
    return {std::move(left), std::move(right)};
}

double diameter_corner(const Box& box, const Point& center, const PseudoMetric& metric) {
    if (!metric.euclidean_monotone()) {
        throw InvalidSchemeError("diameter_corner: metric is not a monotone transform of Euclidean distance; "
                                 "use diameter_grid");
    }
    require_same_dim(box.lower, center, "diameter_corner");
    const std::size_t m = box.dim();
    if (m >= 63) throw InvalidSchemeError("diameter_corner: dimension too large for corner enumeration");
    const std::uint64_t corners = std::uint64_t{1} << m;
    Point corner(static_cast<Eigen::Index>(m));
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < corners; ++mask) {
        for (std::size_t a = 0; a < m; ++a) {
            const auto j = static_cast<Eigen::Index>(a);
            corner[j] = (mask >> a) & 1U ? box.upper[j] : box.lower[j];
        }
        best = std::max(best, metric(center, corner));
    }
    return best;
}

double diameter_grid(const Box& box, const Point& center, const PseudoMetric& metric, std::size_t resolution) {
    if (resolution < 2) throw InvalidSchemeError("diameter_grid: resolution must be >= 2");
    require_same_dim(box.lower, center, "diameter_grid");
    double best = 0.0;
    for_each_grid_point(box, resolution, [&](const Point& p) { best = std::max(best, metric(center, p)); });
    return best;
}

double cell_diameter(const Box& box, const Point& center, const PseudoMetric& metric, std::size_t resolution) {
    return metric.euclidean_monotone() ? diameter_corner(box, center, metric)
                                       : diameter_grid(box, center, metric, resolution);
}

std::vector<std::size_t> greedy_k_center(const PointList& candidates, std::size_t k, const PseudoMetric& metric) {
    if (candidates.empty()) throw std::invalid_argument("greedy_k_center: empty candidate list");
    if (k == 0) throw std::invalid_argument("greedy_k_center: k must be >= 1");
    const std::size_t n = candidates.size();
    std::vector<std::size_t> centers{0};
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = metric(candidates[i], candidates[0]);
    while (centers.size() < std::min(k, n)) {
        std::size_t pick = 0;
        double far = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (nearest[i] > far) {
                far = nearest[i];
                pick = i;
            }
        }
        centers.push_back(pick);
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], metric(candidates[i], candidates[pick]));
    }
    return centers;
}

double cover_radius(const PointList& candidates, const std::vector<std::size_t>& centers, const PseudoMetric& metric) {
    double radius = 0.0;
    for (const auto& p : candidates) {
        double best = std::numeric_limits<double>::infinity();
        for (auto c : centers) best = std::min(best, metric(p, candidates.at(c)));
        radius = std::max(radius, best);
    }
    return radius;
}

std::pair<std::size_t, double> one_center(const PointList& candidates, const PointList& points,
                                          const PseudoMetric& metric) {
    if (candidates.empty()) throw std::invalid_argument("one_center: empty candidate list");
    std::size_t best = 0;
    double best_radius = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        double radius = 0.0;
        for (const auto& p : points) {
            radius = std::max(radius, metric(candidates[c], p));
            if (radius >= best_radius) break;
        }
        if (radius < best_radius) {
            best_radius = radius;
            best = c;
        }
    }
    return {best, points.empty() ? 0.0 : best_radius};
}

Cell make_root(const Box& domain, const PseudoMetric& metric, const PartitionScheme& scheme) {
    scheme.validate();
    Cell root;
    root.box = domain;
    root.id = NodeId::root();
    if (scheme.mode == SplitMode::RegularLongestSide || domain.degenerate()) {
        root.center = domain.center();
        root.delta = cell_diameter(domain, root.center, metric, scheme.resolution);
    } else {
        auto fit = fit_child(domain, metric, scheme.resolution);
        root.center = std::move(fit.center);
        root.delta = fit.delta;
    }
    return root;
}

std::pair<Cell, Cell> split_regular(const Cell& cell, const PseudoMetric& metric, std::size_t resolution) {
    auto [lbox, rbox] = split_regular_boxes(cell.box);
    Point lc = lbox.center();
    Point rc = rbox.center();
    const double ld = cell_diameter(lbox, lc, metric, resolution);
    const double rd = cell_diameter(rbox, rc, metric, resolution);
    return {make_child(lbox, cell.id.left_child(), std::move(lc), ld),
            make_child(rbox, cell.id.right_child(), std::move(rc), rd)};
}

std::pair<Cell, Cell> split_optimized(const Cell& cell, const PseudoMetric& metric, std::size_t resolution) {
    if (resolution < 2) throw InvalidSchemeError("split_optimized: resolution must be >= 2");
    if (cell.box.degenerate()) {
        return {make_child(cell.box, cell.id.left_child(), cell.center, 0.0),
                make_child(cell.box, cell.id.right_child(), cell.center, 0.0)};
    }
    checked_grid_size(resolution, cell.box.dim());

    struct Cut {
        std::size_t axis;
        double position;
    };
    const std::size_t regular_axis = longest_side(cell.box);
    const auto ra = static_cast<Eigen::Index>(regular_axis);
    const double regular_mid = 0.5 * (cell.box.lower[ra] + cell.box.upper[ra]);
    std::vector<Cut> cuts{{regular_axis, regular_mid}};
    for (std::size_t a = 0; a < cell.box.dim(); ++a) {
        const auto j = static_cast<Eigen::Index>(a);
        const double lo = cell.box.lower[j];
        const double ext = cell.box.upper[j] - lo;
        if (ext <= 0.0) continue;
        for (std::size_t k = 1; k < resolution; ++k) {
            const double pos = lo + ext * (static_cast<double>(k) / static_cast<double>(resolution));
            if (a == regular_axis && pos == regular_mid) continue;
            cuts.push_back({a, pos});
        }
    }

    double best_obj = std::numeric_limits<double>::infinity();
    Box best_left, best_right;
    ChildFit best_lfit, best_rfit;
    for (const auto& cut : cuts) {
        const auto j = static_cast<Eigen::Index>(cut.axis);
        Box left = cell.box;
        Box right = cell.box;
        left.upper[j] = cut.position;
        right.lower[j] = cut.position;
        ChildFit lfit = fit_child(left, metric, resolution);
        ChildFit rfit = fit_child(right, metric, resolution);
        const double obj = std::max(lfit.delta, rfit.delta);
        if (!std::isfinite(best_obj) || obj < best_obj - 1e-12 * std::max(1.0, std::abs(best_obj))) {
            best_obj = obj;
            best_left = std::move(left);
            best_right = std::move(right);
            best_lfit = std::move(lfit);
            best_rfit = std::move(rfit);
        }
    }
    return {make_child(best_left, cell.id.left_child(), std::move(best_lfit.center), best_lfit.delta),
            make_child(best_right, cell.id.right_child(), std::move(best_rfit.center), best_rfit.delta)};
}

std::pair<Cell, Cell> split_cell(const Cell& cell, const PseudoMetric& metric, const PartitionScheme& scheme) {
    switch (scheme.mode) {
        case SplitMode::RegularLongestSide:
            return split_regular(cell, metric, scheme.resolution);
        case SplitMode::GreedyKCenter:
            return split_optimized(cell, metric, scheme.resolution);
    }
    throw InvalidSchemeError("split_cell: unknown mode");
}

double lemma3_bound(const MetricAssumption& a, std::size_t depth) {
    const double m = static_cast<double>(a.m);
    return a.C * std::pow(2.0 * std::sqrt(m), a.alpha) * std::exp2(-a.alpha * static_cast<double>(depth) / m);
}

bool owns(const Box& cell, const Box& root, const Point& x) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (x[j] < cell.lower[j]) return false;
        if (x[j] < cell.upper[j]) continue;
        if (x[j] == cell.upper[j] && cell.upper[j] == root.upper[j]) continue;
        return false;
    }
    return true;
}

std::string partition_csv_header(std::size_t dim) {
    std::ostringstream os;
    os << "node_id_t,node_id_i";
    for (const char* prefix : {"lower_", "upper_", "center_"}) {
        for (std::size_t j = 0; j < dim; ++j) os << ',' << prefix << j;
    }
    os << ",delta";
    return os.str();
}

std::string partition_csv_row(const Cell& cell) {
    std::ostringstream os;
    os << cell.depth() << ',' << cell.id.index_string();
    for (const Point* p : {&cell.box.lower, &cell.box.upper, &cell.center}) {
        for (Eigen::Index j = 0; j < p->size(); ++j) os << ',' << format_double((*p)[j]);
    }
    os << ',' << format_double(cell.delta);
    return os.str();
}

}  // namespace gpoo
