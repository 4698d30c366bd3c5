#include "gpoo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gpoo {

Box::Box(Point lo, Point hi) : lower(std::move(lo)), upper(std::move(hi)) {
    require_same_dim(lower, upper, "Box");
    for (Eigen::Index j = 0; j < lower.size(); ++j) {
        if (!(lower[j] <= upper[j])) {
            throw DomainError("Box: lower[" + std::to_string(j) + "] > upper[" + std::to_string(j) + "]");
        }
    }
}

double Box::volume() const { return (upper - lower).prod(); }

bool Box::contains(const Point& x, double slack) const {
    require_same_dim(lower, x, "Box::contains");
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (x[j] < lower[j] - slack || x[j] > upper[j] + slack) return false;
    }
    return true;
}

bool Box::degenerate() const { return (upper - lower).maxCoeff() <= 0.0; }

Box Box::unit(std::size_t dim) { return cube(dim, 0.0, 1.0); }

Box Box::cube(std::size_t dim, double lo, double hi) {
    const auto n = static_cast<Eigen::Index>(dim);
    return Box(Point::Constant(n, lo), Point::Constant(n, hi));
}

TensorGrid::TensorGrid(Box box, std::vector<std::size_t> resolution)
    : box_(std::move(box)), resolution_(std::move(resolution)) {
    if (resolution_.size() != box_.dim()) throw DimensionError("TensorGrid: resolution/box dimension mismatch");
    size_ = 1;
    for (auto r : resolution_) {
        if (r < 1) throw DomainError("TensorGrid: resolution must be >= 1");
        if (size_ > std::numeric_limits<std::size_t>::max() / r) throw DomainError("TensorGrid: size overflow");
        size_ *= r;
    }
}

TensorGrid::TensorGrid(Box box, std::size_t resolution_per_axis)
    : TensorGrid(box, std::vector<std::size_t>(box.dim(), resolution_per_axis)) {}

double TensorGrid::coordinate(std::size_t axis, std::size_t k) const {
    const auto j = static_cast<Eigen::Index>(axis);
    const std::size_t r = resolution_[axis];
    if (r == 1) return box_.center()[j];
    if (k + 1 == r) return box_.upper[j];
    const double t = static_cast<double>(k) / static_cast<double>(r - 1);
    return box_.lower[j] + t * (box_.upper[j] - box_.lower[j]);
}

Point TensorGrid::point(std::size_t flat) const {
    const std::size_t m = dim();
    Point p(static_cast<Eigen::Index>(m));
    for (std::size_t a = m; a-- > 0;) {
        const std::size_t r = resolution_[a];
        p[static_cast<Eigen::Index>(a)] = coordinate(a, flat % r);
        flat /= r;
    }
    return p;
}

PointList TensorGrid::points() const {
    PointList out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) out.push_back(point(i));
    return out;
}

std::size_t TensorGrid::nearest(const Point& x) const {
    require_same_dim(box_.lower, x, "TensorGrid::nearest");
    std::size_t flat = 0;
    for (std::size_t a = 0; a < dim(); ++a) {
        const std::size_t r = resolution_[a];
        std::size_t k = 0;
        if (r > 1) {
            const auto j = static_cast<Eigen::Index>(a);
            const double span = box_.upper[j] - box_.lower[j];
            double t = span > 0.0 ? (x[j] - box_.lower[j]) / span * static_cast<double>(r - 1) : 0.0;
            t = std::clamp(t, 0.0, static_cast<double>(r - 1));
            k = static_cast<std::size_t>(std::floor(t));
            if (k + 1 < r) {
                // equal distance keeps the lower index
                const double below = std::abs(x[j] - coordinate(a, k));
                const double above = std::abs(coordinate(a, k + 1) - x[j]);
                if (above < below) ++k;
            }
        }
        flat = flat * r + k;
    }
    return flat;
}

std::size_t TensorGrid::count_inside(const Box& cell) const {
    std::size_t total = 1;
    for (std::size_t a = 0; a < dim(); ++a) {
        const auto j = static_cast<Eigen::Index>(a);
        std::size_t n = 0;
        for (std::size_t k = 0; k < resolution_[a]; ++k) {
            const double c = coordinate(a, k);
            if (c >= cell.lower[j] && c <= cell.upper[j]) ++n;
        }
        total *= n;
        if (total == 0) return 0;
    }
    return total;
}

}  // namespace gpoo
