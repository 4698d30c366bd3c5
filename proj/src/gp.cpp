#include "gpoo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "gpoo/csv.hpp"

namespace gpoo {

namespace {

constexpr std::size_t kMaxSampleGrid = 10'000;

// LLᵀ = A + jitter·I, raising jitter ×10 up to the cap.
Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& A, double jitter, const char* what) {
    const auto n = A.rows();
    while (true) {
        Eigen::LLT<Eigen::MatrixXd> llt(A + jitter * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) return llt.matrixL();
        jitter *= 10.0;
        if (jitter > GpPosterior::kJitterCap * (1.0 + 1e-12)) {
            throw ConditioningError(std::string(what) + ": Cholesky failed after jitter escalation to 1e-6");
        }
    }
}

Eigen::VectorXd standard_normal(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = gauss(rng);
    return z;
}

bool separable(const KernelSpec& spec) { return spec.family == KernelFamily::SquaredExponential; }

std::vector<Eigen::MatrixXd> axis_factors(const KernelSpec& spec, const TensorGrid& grid) {
    std::vector<Eigen::MatrixXd> factors;
    const KernelSpec unit = KernelSpec::squared_exponential(spec.lengthscale, 1.0);
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        const std::size_t r = grid.resolution()[a];
        PointList axis_points;
        for (std::size_t k = 0; k < r; ++k) axis_points.push_back(Point::Constant(1, grid.coordinate(a, k)));
        factors.push_back(robust_cholesky(gram_matrix(unit, axis_points), GpPosterior::kJitterFloor, "sample_prior"));
    }
    return factors;
}

// y = (⊗_a L_a) z with axis 0 slowest in the flattened index.
Eigen::VectorXd kronecker_apply(const std::vector<Eigen::MatrixXd>& factors, Eigen::VectorXd z) {
    const auto total = z.size();
    Eigen::Index stride = total;
    Eigen::VectorXd fiber, out;
    for (const auto& L : factors) {
        const Eigen::Index r = L.rows();
        stride /= r;
        const Eigen::Index block = r * stride;
        fiber.resize(r);
        for (Eigen::Index outer = 0; outer < total; outer += block) {
            for (Eigen::Index inner = 0; inner < stride; ++inner) {
                for (Eigen::Index k = 0; k < r; ++k) fiber[k] = z[outer + k * stride + inner];
                out.noalias() = L.triangularView<Eigen::Lower>() * fiber;
                for (Eigen::Index k = 0; k < r; ++k) z[outer + k * stride + inner] = out[k];
            }
        }
    }
    return z;
}

}  // namespace

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointList& points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            K(i, j) = kernel_eval(spec, points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
            K(j, i) = K(i, j);
        }
    }
    return K;
}

GpPosterior::GpPosterior(KernelSpec spec, double noise)
    : spec_(std::move(spec)), noise_(noise), jitter_(std::max(noise, kJitterFloor)) {
    spec_.validate();
    if (!(noise >= 0.0)) throw std::invalid_argument("GpPosterior: noise must be >= 0");
}

void GpPosterior::refactor() {
    const Eigen::MatrixXd K = gram_matrix(spec_, inputs_);
    const auto n = K.rows();
    while (true) {
        Eigen::LLT<Eigen::MatrixXd> llt(K + jitter_ * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) {
            chol_ = llt.matrixL();
            return;
        }
        jitter_ *= 10.0;
        if (jitter_ > kJitterCap * (1.0 + 1e-12)) {
            throw ConditioningError("GpPosterior: Cholesky failed after jitter escalation to 1e-6");
        }
    }
}

void GpPosterior::solve_weights() {
    weights_ = chol_.triangularView<Eigen::Lower>().solve(targets_);
    chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(weights_);
}

void GpPosterior::add_observation(const Point& x, double y) {
    if (!inputs_.empty()) require_same_dim(inputs_.front(), x, "GpPosterior::add_observation");
    const auto n = static_cast<Eigen::Index>(inputs_.size());
    Eigen::VectorXd kvec(n);
    for (Eigen::Index i = 0; i < n; ++i) kvec[i] = kernel_eval(spec_, inputs_[static_cast<std::size_t>(i)], x);
    const double kxx = kernel_eval(spec_, x, x);

    Eigen::VectorXd row = n > 0 ? Eigen::VectorXd(chol_.triangularView<Eigen::Lower>().solve(kvec)) : kvec;
    const double pivot = kxx + jitter_ - row.squaredNorm();

    inputs_.push_back(x);
    targets_.conservativeResize(n + 1);
    targets_[n] = y;
    if (pivot > 0.0 && std::isfinite(pivot)) {
        chol_.conservativeResize(n + 1, n + 1);
        chol_.row(n).head(n) = row.transpose();
        chol_.col(n).head(n).setZero();
        chol_(n, n) = std::sqrt(pivot);
    } else {
        const double saved = jitter_;
        try {
            jitter_ *= 10.0;
            if (jitter_ > kJitterCap * (1.0 + 1e-12)) {
                throw ConditioningError("GpPosterior: matrix not positive definite and jitter already at cap");
            }
            refactor();
        } catch (...) {
            inputs_.pop_back();
            targets_.conservativeResize(n);
            jitter_ = saved;
            throw;
        }
    }
    solve_weights();
}

GpPosterior GpPosterior::updated(const Point& x, double y) const {
    GpPosterior next = *this;
    next.add_observation(x, y);
    return next;
}

std::pair<double, double> GpPosterior::mean_var(const Point& x) const {
    const double kxx = kernel_eval(spec_, x, x);
    if (inputs_.empty()) return {0.0, std::max(kxx, 0.0)};
    require_same_dim(inputs_.front(), x, "GpPosterior::mean_var");
    const auto n = static_cast<Eigen::Index>(inputs_.size());
    Eigen::VectorXd kvec(n);
    for (Eigen::Index i = 0; i < n; ++i) kvec[i] = kernel_eval(spec_, inputs_[static_cast<std::size_t>(i)], x);
    const double mean = kvec.dot(weights_);
    chol_.triangularView<Eigen::Lower>().solveInPlace(kvec);
    return {mean, std::max(kxx - kvec.squaredNorm(), 0.0)};
}

void GpPosterior::predict(const Eigen::Ref<const Eigen::MatrixXd>& cross, const Eigen::VectorXd& prior_var, Eigen::VectorXd& mean,
                          Eigen::VectorXd& var) const {
    if (inputs_.empty()) {
        mean = Eigen::VectorXd::Zero(prior_var.size());
        var = prior_var.cwiseMax(0.0);
        return;
    }
    if (cross.cols() != static_cast<Eigen::Index>(inputs_.size()) || cross.rows() != prior_var.size()) {
        throw DimensionError("GpPosterior::predict: cross-covariance shape mismatch");
    }
    mean.noalias() = cross * weights_;
    Eigen::MatrixXd V = cross.transpose();
    chol_.triangularView<Eigen::Lower>().solveInPlace(V);
    var = (prior_var - V.colwise().squaredNorm().transpose()).cwiseMax(0.0);
}

Eigen::MatrixXd sampler_factor(const KernelSpec& spec, const PointList& grid) {
    if (grid.size() > kMaxSampleGrid) throw std::length_error("sample_prior_grid: grid exceeds 10^4 points");
    return robust_cholesky(gram_matrix(spec, grid), GpPosterior::kJitterFloor, "sample_prior_grid");
}

Eigen::MatrixXd sampler_factor_tensor(const KernelSpec& spec, const TensorGrid& grid) {
    if (!separable(spec)) return sampler_factor(spec, grid.points());
    Eigen::MatrixXd L = Eigen::MatrixXd::Constant(1, 1, std::sqrt(spec.variance));
    for (const auto& f : axis_factors(spec, grid)) {
        Eigen::MatrixXd next(L.rows() * f.rows(), L.cols() * f.cols());
        for (Eigen::Index i = 0; i < L.rows(); ++i) {
            for (Eigen::Index j = 0; j < L.cols(); ++j) {
                next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = L(i, j) * f;
            }
        }
        L = std::move(next);
    }
    return L;
}

GpSample sample_prior_grid(const KernelSpec& spec, const PointList& grid, std::uint64_t seed) {
    spec.validate();
    if (grid.empty()) throw std::invalid_argument("sample_prior_grid: empty grid");
    const Eigen::MatrixXd L = sampler_factor(spec, grid);
    GpSample s;
    s.spec = spec;
    s.grid = grid;
    s.seed = seed;
    s.values = L.triangularView<Eigen::Lower>() * standard_normal(grid.size(), seed);
    return s;
}

GpSample sample_prior_tensor(const KernelSpec& spec, const TensorGrid& grid, std::uint64_t seed) {
    spec.validate();
    if (grid.size() > kMaxSampleGrid) throw std::length_error("sample_prior_tensor: grid exceeds 10^4 points");
    if (!separable(spec)) {
        GpSample s = sample_prior_grid(spec, grid.points(), seed);
        s.tensor = grid;
        return s;
    }
    GpSample s;
    s.spec = spec;
    s.grid = grid.points();
    s.seed = seed;
    s.tensor = grid;
    s.values = std::sqrt(spec.variance) * kronecker_apply(axis_factors(spec, grid), standard_normal(grid.size(), seed));
    return s;
}

std::size_t sample_nearest_index(const GpSample& sample, const Point& x) {
    if (sample.grid.empty()) throw std::invalid_argument("sample_eval: empty sample");
    if (sample.tensor) return sample.tensor->nearest(x);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sample.grid.size(); ++i) {
        const double d = (sample.grid[i] - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

double sample_eval(const GpSample& sample, const Point& x) {
    return sample.values[static_cast<Eigen::Index>(sample_nearest_index(sample, x))];
}

void write_sample_csv(std::ostream& os, const GpSample& sample) {
    const std::size_t m = sample.grid.empty() ? 0 : static_cast<std::size_t>(sample.grid.front().size());
    for (std::size_t j = 0; j < m; ++j) os << 'x' << j << ',';
    os << "value\n";
    for (std::size_t i = 0; i < sample.grid.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) os << format_double(sample.grid[i][static_cast<Eigen::Index>(j)]) << ',';
        os << format_double(sample.values[static_cast<Eigen::Index>(i)]) << '\n';
    }
}

GpSample read_sample_csv(std::istream& is, const KernelSpec& spec) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("read_sample_csv: missing header");
    const auto header = split_csv_line(line);
    if (header.empty() || header.back() != "value") throw std::invalid_argument("read_sample_csv: bad header");
    const std::size_t m = header.size() - 1;
    GpSample s;
    s.spec = spec;
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != m + 1) throw std::invalid_argument("read_sample_csv: ragged row");
        Point p(static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < m; ++j) p[static_cast<Eigen::Index>(j)] = parse_double(cells[j]);
        s.grid.push_back(std::move(p));
        values.push_back(parse_double(cells[m]));
    }
    s.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    return s;
}

}  // namespace gpoo
