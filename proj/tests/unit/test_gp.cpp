#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>

#include "gpoo/gp.hpp"

using namespace gpoo;

namespace {

PointList random_points(std::size_t n, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointList out;
    for (std::size_t i = 0; i < n; ++i) {
        Point x(static_cast<Eigen::Index>(m));
        for (auto& v : x) v = u(rng);
        out.push_back(x);
    }
    return out;
}

Eigen::VectorXd cross_vector(const KernelSpec& k, const PointList& pts, const Point& x) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) v[static_cast<Eigen::Index>(i)] = kernel_eval(k, pts[i], x);
    return v;
}

}  // namespace

TEST_CASE("prior before any observation") {
    const auto se = KernelSpec::squared_exponential(0.2, 1.7);
    GpPosterior post(se, 1e-3);
    const auto [mu, var] = post.mean_var(Point::Constant(2, 0.4));
    CHECK(mu == 0.0);
    CHECK(var == doctest::Approx(1.7));
}

TEST_CASE("single observation matches scalar algebra") {
    const auto se = KernelSpec::squared_exponential(0.3);
    const double lambda = 1e-3;
    GpPosterior post(se, lambda);
    const Point x1 = Point::Constant(2, 0.5);
    post.add_observation(x1, 0.8);
    for (const auto& q : random_points(5, 2, 17)) {
        const double k1 = kernel_eval(se, q, x1);
        const auto [mu, var] = post.mean_var(q);
        CHECK(mu == doctest::Approx(k1 * 0.8 / (1.0 + lambda)).epsilon(1e-12));
        CHECK(var == doctest::Approx(1.0 - k1 * k1 / (1.0 + lambda)).epsilon(1e-10));
    }
}

TEST_CASE("incremental posterior equals a batch dense solve") {
    const auto se = KernelSpec::matern(MaternNu::FiveHalves, 0.3);
    const double lambda = 1e-4;
    const auto pts = random_points(50, 3, 5);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> z;
    Eigen::VectorXd y(50);
    for (auto& v : y) v = z(rng);
    GpPosterior post(se, lambda);
    const auto probes = random_points(20, 3, 8);
    for (std::size_t n = 1; n <= 50; ++n) {
        post.add_observation(pts[n - 1], y[static_cast<Eigen::Index>(n - 1)]);
        if (n % 7 != 0 && n != 50) continue;
        const PointList sub(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(n));
        Eigen::MatrixXd K = gram_matrix(se, sub);
        K.diagonal().array() += lambda;
        const Eigen::LDLT<Eigen::MatrixXd> solver(K);
        const Eigen::VectorXd alpha = solver.solve(y.head(static_cast<Eigen::Index>(n)));
        CHECK((post.weights() - alpha).cwiseAbs().maxCoeff() < 1e-8);
        for (const auto& q : probes) {
            const Eigen::VectorXd kx = cross_vector(se, sub, q);
            const auto [mu, var] = post.mean_var(q);
            CHECK(std::abs(mu - kx.dot(alpha)) < 1e-8);
            CHECK(std::abs(var - std::max(0.0, 1.0 - kx.dot(solver.solve(kx)))) < 1e-8);
        }
    }
}

TEST_CASE("batch predict agrees with pointwise queries") {
    const auto se = KernelSpec::squared_exponential(0.25);
    GpPosterior post(se, 1e-3);
    const auto pts = random_points(12, 2, 3);
    for (std::size_t i = 0; i < pts.size(); ++i) post.add_observation(pts[i], std::sin(5.0 * pts[i][0]));
    const auto probes = random_points(30, 2, 4);
    Eigen::MatrixXd cross(30, 12);
    for (Eigen::Index r = 0; r < 30; ++r) cross.row(r) = cross_vector(se, pts, probes[static_cast<std::size_t>(r)]).transpose();
    Eigen::VectorXd mean, var;
    post.predict(cross, Eigen::VectorXd::Ones(30), mean, var);
    for (Eigen::Index r = 0; r < 30; ++r) {
        const auto [mu, v] = post.mean_var(probes[static_cast<std::size_t>(r)]);
        CHECK(mean[r] == doctest::Approx(mu).epsilon(1e-12));
        CHECK(var[r] == doctest::Approx(v).epsilon(1e-9));
    }
}

TEST_CASE("noiseless interpolation") {
    const auto se = KernelSpec::squared_exponential(0.3);
    GpPosterior post(se, 1e-6);
    const auto pts = random_points(10, 2, 12);
    for (const auto& x : pts) post.add_observation(x, std::cos(3.0 * x[0]) + x[1]);
    for (const auto& x : pts) {
        const auto [mu, var] = post.mean_var(x);
        CHECK(std::abs(mu - (std::cos(3.0 * x[0]) + x[1])) < 1e-3);
        CHECK(var <= 1e-4);
    }
}

TEST_CASE("far from the data the prior returns") {
    const auto se = KernelSpec::squared_exponential(0.1);
    GpPosterior post(se, 1e-3);
    for (const auto& x : random_points(8, 2, 1)) post.add_observation(x, 1.0);
    const auto [mu, var] = post.mean_var(Point::Constant(2, 3.0));
    CHECK(std::abs(mu) < 1e-6);
    CHECK(std::abs(var - 1.0) < 1e-6);
}

TEST_CASE("variance never increases with more data") {
    const auto se = KernelSpec::squared_exponential(0.2);
    GpPosterior post(se, 1e-3);
    const auto probes = random_points(100, 2, 2);
    std::vector<double> prev(probes.size(), 1.0);
    for (const auto& x : random_points(25, 2, 9)) {
        post.add_observation(x, x.sum());
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const double v = post.mean_var(probes[i]).second;
            CHECK(v <= prev[i] + 1e-9);
            CHECK(v >= 0.0);
            prev[i] = v;
        }
    }
}

TEST_CASE("updated leaves the original posterior intact") {
    GpPosterior a(KernelSpec::squared_exponential(0.2), 1e-3);
    a.add_observation(Point::Constant(1, 0.1), 1.0);
    const GpPosterior b = a.updated(Point::Constant(1, 0.9), -1.0);
    CHECK(a.size() == 1);
    CHECK(b.size() == 2);
}

TEST_CASE("duplicate inputs stay well conditioned") {
    GpPosterior post(KernelSpec::squared_exponential(0.2), 0.0);
    const Point x = Point::Constant(2, 0.5);
    post.add_observation(x, 1.0);
    post.add_observation(x, 1.0);
    CHECK(post.jitter() <= GpPosterior::kJitterCap);
    CHECK(post.mean_var(x).first == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("sampler factor reconstructs the Gram matrix") {
    const auto grid = TensorGrid(Box::unit(2), 9);
    for (const auto& spec : {KernelSpec::squared_exponential(0.3), KernelSpec::matern(MaternNu::ThreeHalves, 0.3)}) {
        const auto pts = grid.points();
        const Eigen::MatrixXd K = gram_matrix(spec, pts);
        const Eigen::MatrixXd L = sampler_factor(spec, pts);
        CHECK((L * L.transpose() - K).norm() / K.norm() < 1e-8);
        const Eigen::MatrixXd T = sampler_factor_tensor(spec, grid);
        CHECK((T * T.transpose() - K).norm() / K.norm() < 1e-8);
    }
}

TEST_CASE("tensor sample equals the materialized factor times the same normals") {
    const auto se = KernelSpec::squared_exponential(0.3);
    const TensorGrid grid(Box::unit(2), 6);
    const auto s = sample_prior_tensor(se, grid, 42);
    REQUIRE(s.tensor.has_value());
    std::mt19937_64 rng(42);
    std::normal_distribution<double> z;
    Eigen::VectorXd w(static_cast<Eigen::Index>(grid.size()));
    for (auto& v : w) v = z(rng);
    const Eigen::VectorXd expect = sampler_factor_tensor(se, grid) * w;
    CHECK((s.values - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("samples are reproducible per seed") {
    const auto se = KernelSpec::squared_exponential(0.1);
    const TensorGrid grid(Box::unit(3), 11);
    const auto a = sample_prior_tensor(se, grid, 3);
    const auto b = sample_prior_tensor(se, grid, 3);
    const auto c = sample_prior_tensor(se, grid, 4);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    const PointList one{Point::Constant(2, 0.5)};
    CHECK(sample_prior_grid(se, one, 9).values[0] == sample_prior_grid(se, one, 9).values[0]);
}

TEST_CASE("sample marginals match the prior") {
    const auto se = KernelSpec::squared_exponential(0.3);
    PointList two{Point::Constant(1, 0.2), Point::Constant(1, 0.5)};
    const double k01 = kernel_eval(se, two[0], two[1]);
    double mean = 0.0, cov = 0.0;
    const int seeds = 5000;
    for (int s = 0; s < seeds; ++s) {
        const auto v = sample_prior_grid(se, two, static_cast<std::uint64_t>(s)).values;
        if (s < 2000) mean += v[0];
        cov += v[0] * v[1];
    }
    mean /= 2000.0;
    cov /= seeds;
    CHECK(std::abs(mean) <= 0.08);
    CHECK(std::abs(cov - k01) <= 0.05);
}

TEST_CASE("nearest-point evaluation") {
    GpSample s;
    s.spec = KernelSpec::squared_exponential(0.1);
    for (int i = 0; i <= 10; ++i) s.grid.push_back(Point::Constant(1, i / 10.0));
    s.values = Eigen::VectorXd::LinSpaced(11, 0.0, 10.0);
    CHECK(sample_eval(s, Point::Constant(1, 0.3)) == 3.0);
    CHECK(sample_eval(s, Point::Constant(1, 0.25)) == 2.0);
    CHECK(sample_eval(s, Point::Constant(1, 1.0 + 1e-3)) == 10.0);
    CHECK(sample_eval(s, Point::Constant(1, -1e-3)) == 0.0);
    s.tensor = TensorGrid(Box::unit(1), 11);
    CHECK(sample_eval(s, Point::Constant(1, 0.25)) == 2.0);
    CHECK(sample_eval(s, Point::Constant(1, 1.0 + 1e-3)) == 10.0);
    GpSample empty;
    CHECK_THROWS((void)sample_eval(empty, Point::Constant(1, 0.0)));
}

TEST_CASE("sample csv round trip") {
    const auto se = KernelSpec::squared_exponential(0.2);
    const auto s = sample_prior_tensor(se, TensorGrid(Box::unit(2), 5), 1);
    std::stringstream buf;
    write_sample_csv(buf, s);
    CHECK(buf.str().rfind("x0,x1,value\n", 0) == 0);
    const auto back = read_sample_csv(buf, se);
    CHECK(back.values == s.values);
    REQUIRE(back.grid.size() == s.grid.size());
    for (std::size_t i = 0; i < s.grid.size(); ++i) CHECK(back.grid[i] == s.grid[i]);
}

TEST_CASE("grid size guard") {
    const PointList big(10001, Point::Zero(1));
    CHECK_THROWS((void)sample_prior_grid(KernelSpec::squared_exponential(0.1), big, 0));
}
