#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gpoo {

using Point = Eigen::VectorXd;
using PointList = std::vector<Point>;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Axis-aligned box [lower, upper].
struct Box {
    Point lower;
    Point upper;

    Box() = default;
    Box(Point lo, Point hi);

    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(lower.size()); }
    [[nodiscard]] Point center() const { return 0.5 * (lower + upper); }
    [[nodiscard]] Point extent() const { return upper - lower; }
    [[nodiscard]] double volume() const;
    [[nodiscard]] bool contains(const Point& x, double slack = 0.0) const;
    [[nodiscard]] bool degenerate() const;

    static Box unit(std::size_t dim);
    static Box cube(std::size_t dim, double lo, double hi);
};

/// Regular tensor-product grid over a box, `resolution[j]` points per axis
/// including both faces. Flattened index has axis 0 slowest.
class TensorGrid {
public:
    TensorGrid() = default;
    TensorGrid(Box box, std::vector<std::size_t> resolution);
    TensorGrid(Box box, std::size_t resolution_per_axis);

    [[nodiscard]] const Box& box() const { return box_; }
    [[nodiscard]] std::size_t dim() const { return box_.dim(); }
    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] const std::vector<std::size_t>& resolution() const { return resolution_; }

    [[nodiscard]] double coordinate(std::size_t axis, std::size_t k) const;
    [[nodiscard]] Point point(std::size_t flat) const;
    [[nodiscard]] PointList points() const;

    /// Nearest grid point under Euclidean distance, ties to the lowest index.
    /// Points outside the box clamp to the boundary layer.
    [[nodiscard]] std::size_t nearest(const Point& x) const;

    /// Number of grid points with every coordinate in [lo_j, hi_j].
    [[nodiscard]] std::size_t count_inside(const Box& cell) const;

private:
    Box box_;
    std::vector<std::size_t> resolution_;
    std::size_t size_ = 0;
};

inline void require_same_dim(const Point& a, const Point& b, const char* what) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + ")");
    }
}

}  // namespace gpoo
