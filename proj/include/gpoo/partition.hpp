#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gpoo/geometry.hpp"
#include "gpoo/kernel.hpp"

namespace gpoo {

struct DegenerateCellError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a diameter routine is asked for something its metric cannot support.
struct InvalidSchemeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Tree address (t, i): depth t and 1-based index i within the level.
/// Children of (t, i) are (t+1, 2i−1) and (t+1, 2i). The index is kept as an
/// arbitrary-width offset i−1 so deep trees do not overflow.
class NodeId {
public:
    NodeId() = default;

    static NodeId root() { return NodeId{}; }

    [[nodiscard]] std::size_t depth() const { return depth_; }
    [[nodiscard]] NodeId left_child() const { return child(0); }
    [[nodiscard]] NodeId right_child() const { return child(1); }

    /// Decimal rendering of i.
    [[nodiscard]] std::string index_string() const;

    friend std::strong_ordering operator<=>(const NodeId& a, const NodeId& b);
    friend bool operator==(const NodeId& a, const NodeId& b) { return (a <=> b) == 0; }

private:
    [[nodiscard]] NodeId child(std::uint64_t bit) const;

    std::size_t depth_ = 0;
    std::vector<std::uint64_t> offset_{0};  // little-endian limbs of i−1
};

struct Cell {
    Box box;
    NodeId id;
    Point center;
    double delta = 0.0;

    [[nodiscard]] std::size_t depth() const { return id.depth(); }
};

enum class SplitMode { RegularLongestSide, GreedyKCenter };

struct PartitionScheme {
    SplitMode mode = SplitMode::RegularLongestSide;
    /// Grid points per axis for grid diameters and optimized cuts (≥ 2).
    std::size_t resolution = 5;

    void validate() const;
};

/// Axis cut by the regular scheme: the longest Euclidean side, lowest index on ties.
[[nodiscard]] std::size_t longest_side(const Box& box);

/// Midpoint cut of the longest side. Throws DegenerateCellError for a zero-volume box.
[[nodiscard]] std::pair<Box, Box> split_regular_boxes(const Box& box);

/// max over the 2^m corners of d(center, corner). Requires a Euclidean-monotone metric.
[[nodiscard]] double diameter_corner(const Box& box, const Point& center, const PseudoMetric& metric);

/// max of d(center, g) over the resolution^m grid on the box (corners included).
/// Refuses grids with more than 10⁷ points.
[[nodiscard]] double diameter_grid(const Box& box, const Point& center, const PseudoMetric& metric,
                                   std::size_t resolution);

/// Corner diameter when the metric allows it, grid diameter otherwise.
[[nodiscard]] double cell_diameter(const Box& box, const Point& center, const PseudoMetric& metric,
                                   std::size_t resolution);

/// Gonzalez farthest-first traversal. Starts from candidates[0]; each next
/// center maximizes the distance to the chosen set (lowest index on ties).
/// Returns indices of min(k, |candidates|) centers.
[[nodiscard]] std::vector<std::size_t> greedy_k_center(const PointList& candidates, std::size_t k,
                                                       const PseudoMetric& metric);

/// max over candidates of the distance to the nearest chosen center.
[[nodiscard]] double cover_radius(const PointList& candidates, const std::vector<std::size_t>& centers,
                                  const PseudoMetric& metric);

/// Minimax center: the candidate minimizing the largest distance to any
/// point, lowest index on ties. Returns (index, radius).
[[nodiscard]] std::pair<std::size_t, double> one_center(const PointList& candidates, const PointList& points,
                                                        const PseudoMetric& metric);

[[nodiscard]] Cell make_root(const Box& domain, const PseudoMetric& metric, const PartitionScheme& scheme);

/// Regular split: Euclidean child centers, diameters cached.
[[nodiscard]] std::pair<Cell, Cell> split_regular(const Cell& cell, const PseudoMetric& metric,
                                                  std::size_t resolution = 5);

/// Single axis-parallel cut minimizing max(Δ_left, Δ_right). Candidate cuts
/// are the interior positions j/resolution of every axis plus the regular
/// midpoint; each child's center is the minimax grid point (Euclidean box
/// center included as a candidate). The regular cut wins ties. A degenerate
/// cell yields two zero-diameter copies.
[[nodiscard]] std::pair<Cell, Cell> split_optimized(const Cell& cell, const PseudoMetric& metric,
                                                    std::size_t resolution);

/// Dispatch on the scheme mode.
[[nodiscard]] std::pair<Cell, Cell> split_cell(const Cell& cell, const PseudoMetric& metric,
                                               const PartitionScheme& scheme);

/// C(2√m)^α · 2^(−αh/m).
[[nodiscard]] double lemma3_bound(const MetricAssumption& assumption, std::size_t depth);

/// Half-open membership: a cell owns its lower faces and its upper faces only
/// where they coincide with the root's upper faces.
[[nodiscard]] bool owns(const Box& cell, const Box& root, const Point& x);

/// CSV header for partition traces: node_id_t,node_id_i,lower_*,upper_*,center_*,delta.
[[nodiscard]] std::string partition_csv_header(std::size_t dim);
[[nodiscard]] std::string partition_csv_row(const Cell& cell);

}  // namespace gpoo
