#include "gpoo/kernel.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <utility>

namespace gpoo {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

double radial_correlation(const KernelSpec& s, double r) {
    const double l = s.lengthscale;
    switch (s.family) {
        case KernelFamily::SquaredExponential:
            return std::exp(-0.5 * (r * r) / (l * l));
        case KernelFamily::Matern:
            switch (s.nu) {
                case MaternNu::Half:
                    return std::exp(-r / l);
                case MaternNu::ThreeHalves: {
                    const double a = kSqrt3 * r / l;
                    return (1.0 + a) * std::exp(-a);
                }
                case MaternNu::FiveHalves: {
                    const double a = kSqrt5 * r / l;
                    return (1.0 + a + a * a / 3.0) * std::exp(-a);
                }
            }
            break;
        case KernelFamily::RationalQuadratic:
            return std::pow(1.0 + (r * r) / (2.0 * s.shape * l * l), -s.shape);
        default:
            break;
    }
    throw KernelError("radial_correlation: not a stationary family");
}

struct EnvelopeKey {
    KernelFamily family;
    MaternNu nu;
    double lengthscale;
    double variance;
    std::size_t m;
    auto operator<=>(const EnvelopeKey&) const = default;
};

double empirical_envelope_constant(const KernelSpec& spec, std::size_t m, double alpha) {
    constexpr std::size_t kPairs = 100000;
    constexpr double kSafety = 1.05;
    const auto dim = static_cast<Eigen::Index>(m);
    const double max_r = std::sqrt(static_cast<double>(m));

    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Separations are log-uniform in [1e-6, √m] so the small-r regime,
    // where these ratios peak, is represented.
    const double log_lo = std::log(1e-6);
    const double log_hi = std::log(max_r);
    double best = 0.0;
    Point x(dim), y(dim), dir(dim);
    std::size_t accepted = 0;
    while (accepted < kPairs) {
        for (Eigen::Index j = 0; j < dim; ++j) x[j] = unit(rng);
        for (Eigen::Index j = 0; j < dim; ++j) dir[j] = gauss(rng);
        const double norm = dir.norm();
        if (norm == 0.0) continue;
        const double r = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
        y = x + (r / norm) * dir;
        if (y.minCoeff() < 0.0 || y.maxCoeff() > 1.0) continue;
        ++accepted;
        const double dist = (x - y).norm();
        if (dist <= 0.0) continue;
        best = std::max(best, canonical_metric(spec, x, y) / std::pow(dist, alpha));
    }
    return kSafety * best;
}

}  // namespace

KernelSpec KernelSpec::squared_exponential(double lengthscale, double variance) {
    KernelSpec s;
    s.family = KernelFamily::SquaredExponential;
    s.lengthscale = lengthscale;
    s.variance = variance;
    s.validate();
    return s;
}

KernelSpec KernelSpec::matern(MaternNu nu, double lengthscale, double variance) {
    KernelSpec s;
    s.family = KernelFamily::Matern;
    s.nu = nu;
    s.lengthscale = lengthscale;
    s.variance = variance;
    s.validate();
    return s;
}

KernelSpec KernelSpec::rational_quadratic(double shape, double lengthscale, double variance) {
    KernelSpec s;
    s.family = KernelFamily::RationalQuadratic;
    s.shape = shape;
    s.lengthscale = lengthscale;
    s.variance = variance;
    s.validate();
    return s;
}

KernelSpec KernelSpec::wiener(double lengthscale, double variance) {
    KernelSpec s;
    s.family = KernelFamily::Wiener;
    s.lengthscale = lengthscale;
    s.variance = variance;
    s.validate();
    return s;
}

KernelSpec KernelSpec::quadratic(double bias, double variance) {
    KernelSpec s;
    s.family = KernelFamily::Quadratic;
    s.bias = bias;
    s.variance = variance;
    s.validate();
    return s;
}

KernelSpec KernelSpec::linear(double bias, double variance) {
    KernelSpec s;
    s.family = KernelFamily::Linear;
    s.bias = bias;
    s.variance = variance;
    s.validate();
    return s;
}

void KernelSpec::validate() const {
    if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) throw KernelError("kernel: lengthscale must be > 0");
    if (!(variance > 0.0) || !std::isfinite(variance)) throw KernelError("kernel: variance must be > 0");
    if (family == KernelFamily::RationalQuadratic && !(shape > 0.0)) {
        throw KernelError("kernel: rational-quadratic shape must be > 0");
    }
    if (family == KernelFamily::Linear && bias < 0.0) throw KernelError("kernel: linear bias must be >= 0");
    if (!std::isfinite(bias)) throw KernelError("kernel: bias must be finite");
}

bool KernelSpec::stationary() const {
    return family == KernelFamily::SquaredExponential || family == KernelFamily::Matern ||
           family == KernelFamily::RationalQuadratic;
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    os << family_name(family);
    if (family == KernelFamily::Matern) os << "(nu=" << matern_nu_value(nu) << ")";
    if (family == KernelFamily::RationalQuadratic) os << "(shape=" << shape << ")";
    if (family == KernelFamily::Quadratic || family == KernelFamily::Linear) {
        os << "(bias=" << bias << ")";
    } else {
        os << " l=" << lengthscale;
    }
    os << " var=" << variance;
    return os.str();
}

double matern_nu_value(MaternNu nu) {
    switch (nu) {
        case MaternNu::Half: return 0.5;
        case MaternNu::ThreeHalves: return 1.5;
        case MaternNu::FiveHalves: return 2.5;
    }
    return 0.0;
}

MaternNu matern_nu_from_value(double nu) {
    if (nu == 0.5) return MaternNu::Half;
    if (nu == 1.5) return MaternNu::ThreeHalves;
    if (nu == 2.5) return MaternNu::FiveHalves;
    throw KernelError("kernel: unsupported Matern nu " + std::to_string(nu) + " (expected 0.5, 1.5 or 2.5)");
}

std::string_view family_name(KernelFamily family) {
    switch (family) {
        case KernelFamily::SquaredExponential: return "squared_exponential";
        case KernelFamily::Matern: return "matern";
        case KernelFamily::RationalQuadratic: return "rational_quadratic";
        case KernelFamily::Wiener: return "wiener";
        case KernelFamily::Quadratic: return "quadratic";
        case KernelFamily::Linear: return "linear";
    }
    return "unknown";
}

KernelFamily family_from_name(std::string_view name) {
    if (name == "squared_exponential" || name == "se" || name == "rbf") return KernelFamily::SquaredExponential;
    if (name == "matern") return KernelFamily::Matern;
    if (name == "rational_quadratic" || name == "rq") return KernelFamily::RationalQuadratic;
    if (name == "wiener") return KernelFamily::Wiener;
    if (name == "quadratic") return KernelFamily::Quadratic;
    if (name == "linear") return KernelFamily::Linear;
    throw KernelError("kernel: unknown family '" + std::string(name) + "'");
}

double kernel_eval(const KernelSpec& spec, const Point& x, const Point& y) {
    require_same_dim(x, y, "kernel_eval");
    switch (spec.family) {
        case KernelFamily::SquaredExponential:
        case KernelFamily::Matern:
        case KernelFamily::RationalQuadratic:
            return spec.variance * radial_correlation(spec, (x - y).norm());
        case KernelFamily::Wiener:
            if (x.size() > 0 && (x.minCoeff() < 0.0 || y.minCoeff() < 0.0)) {
                throw DomainError("kernel_eval: Wiener kernel requires nonnegative coordinates");
            }
            return spec.variance * 0.5 * (x.norm() + y.norm() - (x - y).norm()) / spec.lengthscale;
        case KernelFamily::Quadratic: {
            const double v = x.dot(y) + spec.bias;
            return spec.variance * v * v;
        }
        case KernelFamily::Linear:
            return spec.variance * (x.dot(y) + spec.bias);
    }
    throw KernelError("kernel_eval: unknown family");
}

double canonical_metric(const KernelSpec& spec, const Point& x, const Point& y) {
    const double radicand = kernel_eval(spec, x, x) + kernel_eval(spec, y, y) - 2.0 * kernel_eval(spec, x, y);
    return std::sqrt(std::max(radicand, 0.0));
}

MetricAssumption metric_envelope(const KernelSpec& spec, std::size_t m) {
    if (m == 0) throw DimensionError("metric_envelope: dimension must be >= 1");
    spec.validate();
    if (spec.family == KernelFamily::SquaredExponential) {
        return {std::sqrt(2.0 / spec.lengthscale), 1.0, m};
    }
    if (spec.family != KernelFamily::Matern) {
        throw KernelError("metric_envelope: no envelope for family " + std::string(family_name(spec.family)));
    }
    const double alpha = spec.nu == MaternNu::Half ? 0.5 : 1.0;

    static std::mutex mutex;
    static std::map<EnvelopeKey, double> cache;
    const EnvelopeKey key{spec.family, spec.nu, spec.lengthscale, spec.variance, m};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return {it->second, alpha, m};
    }
    const double C = empirical_envelope_constant(spec, m, alpha);
    std::lock_guard lock(mutex);
    cache.emplace(key, C);
    return {C, alpha, m};
}

bool is_euclidean_monotone(const KernelSpec& spec) {
    switch (spec.family) {
        case KernelFamily::SquaredExponential:
        case KernelFamily::Matern:
        case KernelFamily::RationalQuadratic:
        case KernelFamily::Wiener:
            return true;
        case KernelFamily::Quadratic:
        case KernelFamily::Linear:
            return false;
    }
    return false;
}

void to_json(nlohmann::json& j, const KernelSpec& spec) {
    j = nlohmann::json{{"family", family_name(spec.family)},
                       {"lengthscale", spec.lengthscale},
                       {"variance", spec.variance}};
    if (spec.family == KernelFamily::Matern) j["nu"] = matern_nu_value(spec.nu);
    if (spec.family == KernelFamily::Quadratic || spec.family == KernelFamily::Linear) j["bias"] = spec.bias;
    if (spec.family == KernelFamily::RationalQuadratic) j["shape"] = spec.shape;
}

void from_json(const nlohmann::json& j, KernelSpec& spec) {
    KernelSpec s;
    s.family = family_from_name(j.at("family").get<std::string>());
    s.lengthscale = j.value("lengthscale", 1.0);
    s.variance = j.value("variance", 1.0);
    if (s.family == KernelFamily::Matern) s.nu = matern_nu_from_value(j.at("nu").get<double>());
    if (j.contains("bias")) s.bias = j.at("bias").get<double>();
    if (j.contains("shape")) s.shape = j.at("shape").get<double>();
    s.validate();
    spec = s;
}

PseudoMetric PseudoMetric::canonical(KernelSpec spec) {
    spec.validate();
    return PseudoMetric(std::move(spec));
}

PseudoMetric PseudoMetric::power_euclidean(double C, double alpha) {
    if (!(C > 0.0) || !(alpha > 0.0)) throw KernelError("power_euclidean: C and alpha must be > 0");
    return PseudoMetric(PowerEuclidean{C, alpha});
}

double PseudoMetric::operator()(const Point& x, const Point& y) const {
    if (const auto* spec = std::get_if<KernelSpec>(&impl_)) return canonical_metric(*spec, x, y);
    const auto& pe = std::get<PowerEuclidean>(impl_);
    require_same_dim(x, y, "PseudoMetric");
    const double r = (x - y).norm();
    return pe.alpha == 1.0 ? pe.C * r : pe.C * std::pow(r, pe.alpha);
}

bool PseudoMetric::euclidean_monotone() const {
    if (const auto* spec = std::get_if<KernelSpec>(&impl_)) return is_euclidean_monotone(*spec);
    return true;
}

std::string PseudoMetric::describe() const {
    if (const auto* spec = std::get_if<KernelSpec>(&impl_)) return "canonical[" + spec->describe() + "]";
    const auto& pe = std::get<PowerEuclidean>(impl_);
    std::ostringstream os;
    os << "power_euclidean(C=" << pe.C << ", alpha=" << pe.alpha << ")";
    return os.str();
}

}  // namespace gpoo
