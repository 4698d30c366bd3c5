#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>

#include <Eigen/Core>

#include "gpoo/geometry.hpp"
#include "gpoo/kernel.hpp"

namespace gpoo {

struct ConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact GP posterior kept as a lower Cholesky factor of (K_n + jitter·I).
///
/// The diagonal term starts at max(noise, 1e-10). When an extension loses
/// positive definiteness the whole factor is rebuilt with the term raised
/// ×10, up to 1e-6; past that a ConditioningError is thrown.
class GpPosterior {
public:
    static constexpr double kJitterFloor = 1e-10;
    static constexpr double kJitterCap = 1e-6;

    GpPosterior(KernelSpec spec, double noise);

    [[nodiscard]] const KernelSpec& spec() const { return spec_; }
    [[nodiscard]] double noise() const { return noise_; }
    [[nodiscard]] double jitter() const { return jitter_; }
    [[nodiscard]] std::size_t size() const { return inputs_.size(); }
    [[nodiscard]] const PointList& inputs() const { return inputs_; }
    [[nodiscard]] const Eigen::VectorXd& targets() const { return targets_; }
    [[nodiscard]] const Eigen::MatrixXd& cholesky() const { return chol_; }
    /// (K_n + jitter·I)^{-1} y_n
    [[nodiscard]] const Eigen::VectorXd& weights() const { return weights_; }

    /// Rank-one extension of the factor, O(n²).
    void add_observation(const Point& x, double y);

    /// Persistent-style update: this posterior is left untouched.
    [[nodiscard]] GpPosterior updated(const Point& x, double y) const;

    /// (μ_n(x), k_n(x,x)) with the variance clamped at zero.
    [[nodiscard]] std::pair<double, double> mean_var(const Point& x) const;

    /// Mean and variance at many points given their cross-covariances
    /// `cross` (rows = query points, cols = observations) and prior variances.
    void predict(const Eigen::Ref<const Eigen::MatrixXd>& cross, const Eigen::VectorXd& prior_var, Eigen::VectorXd& mean,
                 Eigen::VectorXd& var) const;

private:
    void refactor();
    void solve_weights();

    KernelSpec spec_;
    double noise_;
    double jitter_;
    PointList inputs_;
    Eigen::VectorXd targets_;
    Eigen::MatrixXd chol_;
    Eigen::VectorXd weights_;
};

struct GpSample {
    KernelSpec spec;
    PointList grid;
    Eigen::VectorXd values;
    std::uint64_t seed = 0;
    /// Present when `grid` is a full tensor grid; enables O(m) nearest lookup.
    std::optional<TensorGrid> tensor;
};

/// Dense sample: values = L z with L Lᵀ = K_grid + 1e-10·I (escalating like
/// GpPosterior), z ~ N(0, I) from mt19937_64(seed). At most 10⁴ points.
[[nodiscard]] GpSample sample_prior_grid(const KernelSpec& spec, const PointList& grid, std::uint64_t seed);

/// Sample on a tensor grid. The SE kernel factorizes over axes, so its Gram
/// matrix is a Kronecker product and L = ⊗ L_a with per-axis jitter; other
/// kernels fall back to the dense path.
[[nodiscard]] GpSample sample_prior_tensor(const KernelSpec& spec, const TensorGrid& grid, std::uint64_t seed);

/// The generator factor L used for a sample, materialized densely (tests only; small grids).
[[nodiscard]] Eigen::MatrixXd sampler_factor(const KernelSpec& spec, const PointList& grid);
[[nodiscard]] Eigen::MatrixXd sampler_factor_tensor(const KernelSpec& spec, const TensorGrid& grid);

/// Value at the nearest grid point (Euclidean, lowest index on ties).
[[nodiscard]] double sample_eval(const GpSample& sample, const Point& x);
[[nodiscard]] std::size_t sample_nearest_index(const GpSample& sample, const Point& x);

[[nodiscard]] Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointList& points);

/// CSV with columns x0..x{m-1},value.
void write_sample_csv(std::ostream& os, const GpSample& sample);
[[nodiscard]] GpSample read_sample_csv(std::istream& is, const KernelSpec& spec);

}  // namespace gpoo
