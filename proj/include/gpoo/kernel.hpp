#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "gpoo/geometry.hpp"

namespace gpoo {

enum class KernelFamily { SquaredExponential, Matern, RationalQuadratic, Wiener, Quadratic, Linear };

/// Supported Matérn smoothness values (half-integers only).
enum class MaternNu { Half, ThreeHalves, FiveHalves };

struct KernelError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Covariance function family plus hyperparameters. Isotropic lengthscale.
///
/// Closed forms, with r = ‖x−y‖₂, σ² = variance:
///   SquaredExponential  σ² exp(−r²/(2l²))
///   Matern ν=1/2        σ² exp(−r/l)
///   Matern ν=3/2        σ² (1 + √3 r/l) exp(−√3 r/l)
///   Matern ν=5/2        σ² (1 + √5 r/l + 5r²/(3l²)) exp(−√5 r/l)
///   RationalQuadratic   σ² (1 + r²/(2 a l²))^(−a), a = shape
///   Wiener              σ² (‖x‖ + ‖y‖ − ‖x−y‖) / (2l), coordinates ≥ 0
///   Quadratic           σ² (x·y + bias)²
///   Linear              σ² (x·y + bias)
///
/// The Wiener form is Lévy's isotropic Brownian covariance; on the
/// half-line it reduces to σ² min(x, y)/l.
struct KernelSpec {
    KernelFamily family = KernelFamily::SquaredExponential;
    double lengthscale = 1.0;
    double variance = 1.0;
    MaternNu nu = MaternNu::ThreeHalves;
    double shape = 1.0;
    double bias = 0.0;

    static KernelSpec squared_exponential(double lengthscale, double variance = 1.0);
    static KernelSpec matern(MaternNu nu, double lengthscale, double variance = 1.0);
    static KernelSpec rational_quadratic(double shape, double lengthscale, double variance = 1.0);
    static KernelSpec wiener(double lengthscale = 1.0, double variance = 1.0);
    static KernelSpec quadratic(double bias = 0.0, double variance = 1.0);
    static KernelSpec linear(double bias = 0.0, double variance = 1.0);

    /// Throws KernelError when a hyperparameter is out of range.
    void validate() const;

    [[nodiscard]] bool stationary() const;
    [[nodiscard]] std::string describe() const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Constants of the Hölder-type envelope d(x,y) ≤ C‖x−y‖₂^α on an m-dimensional domain.
struct MetricAssumption {
    double C = 1.0;
    double alpha = 1.0;
    std::size_t m = 1;

    /// m/α > 1, required by the series bound.
    [[nodiscard]] bool series_admissible() const { return static_cast<double>(m) / alpha > 1.0; }
};

[[nodiscard]] double matern_nu_value(MaternNu nu);
[[nodiscard]] MaternNu matern_nu_from_value(double nu);
[[nodiscard]] std::string_view family_name(KernelFamily family);
[[nodiscard]] KernelFamily family_from_name(std::string_view name);

[[nodiscard]] double kernel_eval(const KernelSpec& spec, const Point& x, const Point& y);

/// √(k(x,x) + k(y,y) − 2k(x,y)), radicand clamped at zero.
[[nodiscard]] double canonical_metric(const KernelSpec& spec, const Point& x, const Point& y);

/// Envelope constants for SE and half-integer Matérn kernels on [0,1]^m.
/// SE uses the closed form C = √(2/l), α = 1. Matérn α is 1/2 for ν = 1/2
/// and 1 otherwise; its C is 1.05 × the largest ratio d/‖x−y‖^α over 10⁵
/// seeded pairs, cached per (spec, m). Throws KernelError for other families.
[[nodiscard]] MetricAssumption metric_envelope(const KernelSpec& spec, std::size_t m);

[[nodiscard]] bool is_euclidean_monotone(const KernelSpec& spec);

void to_json(nlohmann::json& j, const KernelSpec& spec);
void from_json(const nlohmann::json& j, KernelSpec& spec);

/// A dissimilarity used by the partitioner: either a kernel's canonical
/// pseudo-metric or the power-Euclidean stub C‖x−y‖₂^α.
class PseudoMetric {
public:
    struct PowerEuclidean {
        double C = 1.0;
        double alpha = 1.0;
    };

    static PseudoMetric canonical(KernelSpec spec);
    static PseudoMetric power_euclidean(double C = 1.0, double alpha = 1.0);

    [[nodiscard]] double operator()(const Point& x, const Point& y) const;
    [[nodiscard]] bool euclidean_monotone() const;
    [[nodiscard]] const KernelSpec* kernel() const { return std::get_if<KernelSpec>(&impl_); }
    [[nodiscard]] std::string describe() const;

private:
    explicit PseudoMetric(std::variant<KernelSpec, PowerEuclidean> impl) : impl_(std::move(impl)) {}
    std::variant<KernelSpec, PowerEuclidean> impl_;
};

}  // namespace gpoo
