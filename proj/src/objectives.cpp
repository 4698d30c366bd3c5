#include "gpoo/objectives.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "gpoo/csv.hpp"

namespace gpoo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBenchmarkOps = 60.0;

Point vec(std::initializer_list<double> v) {
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) p[i++] = x;
    return p;
}

double branin(const Point& x) {
    const double b = 5.1 / (4.0 * kPi * kPi), c = 5.0 / kPi, t = 1.0 / (8.0 * kPi);
    const double q = x[1] - b * x[0] * x[0] + c * x[0] - 6.0;
    return q * q + 10.0 * (1.0 - t) * std::cos(x[0]) + 10.0;
}

double six_hump_camel(const Point& x) {
    const double a = x[0] * x[0], b = x[1] * x[1];
    return (4.0 - 2.1 * a + a * a / 3.0) * a + x[0] * x[1] + (-4.0 + 4.0 * b) * b;
}

double beale(const Point& x) {
    const double u = x[0], v = x[1];
    const double t1 = 1.5 - u + u * v, t2 = 2.25 - u + u * v * v, t3 = 2.625 - u + u * v * v * v;
    return t1 * t1 + t2 * t2 + t3 * t3;
}

double bohachevsky1(const Point& x) {
    return x[0] * x[0] + 2.0 * x[1] * x[1] - 0.3 * std::cos(3.0 * kPi * x[0]) - 0.4 * std::cos(4.0 * kPi * x[1]) + 0.7;
}

double bohachevsky2(const Point& x) {
    return x[0] * x[0] + 2.0 * x[1] * x[1] - 0.3 * std::cos(3.0 * kPi * x[0]) * std::cos(4.0 * kPi * x[1]) + 0.3;
}

double bohachevsky3(const Point& x) {
    return x[0] * x[0] + 2.0 * x[1] * x[1] - 0.3 * std::cos(3.0 * kPi * x[0] + 4.0 * kPi * x[1]) + 0.3;
}

double rosenbrock(const Point& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i], b = x[i] - 1.0;
        s += 100.0 * a * a + b * b;
    }
    return s;
}

double ackley(const Point& x) {
    const double d = static_cast<double>(x.size());
    const double s1 = x.squaredNorm() / d;
    const double s2 = (2.0 * kPi * x.array()).cos().sum() / d;
    return -20.0 * std::exp(-0.2 * std::sqrt(s1)) - std::exp(s2) + 20.0 + std::exp(1.0);
}

double hartmann3(const Point& x) {
    static constexpr std::array<double, 4> alpha{1.0, 1.2, 3.0, 3.2};
    static constexpr double A[4][3] = {{3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}, {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}};
    static constexpr double P[4][3] = {
        {0.3689, 0.1170, 0.2673}, {0.4699, 0.4387, 0.7470}, {0.1091, 0.8732, 0.5547}, {0.0381, 0.5743, 0.8828}};
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        double inner = 0.0;
        for (int j = 0; j < 3; ++j) inner += A[i][j] * (x[j] - P[i][j]) * (x[j] - P[i][j]);
        s += alpha[i] * std::exp(-inner);
    }
    return -s;
}

double trid(const Point& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        s += (x[i] - 1.0) * (x[i] - 1.0);
        if (i > 0) s -= x[i] * x[i - 1];
    }
    return s;
}

double shekel4(const Point& x) {
    static constexpr std::array<double, 10> beta{0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};
    static constexpr double C[4][10] = {{4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
                                        {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6},
                                        {4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
                                        {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6}};
    double s = 0.0;
    for (int i = 0; i < 10; ++i) {
        double inner = beta[i];
        for (int j = 0; j < 4; ++j) inner += (x[j] - C[j][i]) * (x[j] - C[j][i]);
        s += 1.0 / inner;
    }
    return -s;
}

double dixon_price(const Point& x) {
    double s = (x[0] - 1.0) * (x[0] - 1.0);
    for (Eigen::Index i = 1; i < x.size(); ++i) {
        const double t = 2.0 * x[i] * x[i] - x[i - 1];
        s += static_cast<double>(i + 1) * t * t;
    }
    return s;
}

Point dixon_price_argmin(std::size_t d) {
    Point p(static_cast<Eigen::Index>(d));
    for (std::size_t i = 1; i <= d; ++i) {
        const double e = std::ldexp(1.0, static_cast<int>(i));
        p[static_cast<Eigen::Index>(i - 1)] = std::pow(2.0, -(e - 2.0) / e);
    }
    return p;
}

using RawFn = double (*)(const Point&);

struct Row {
    BenchmarkEntry entry;
    RawFn fn;
};

std::string normalize(std::string_view name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

const std::vector<Row>& rows() {
    static const std::vector<Row> table = [] {
        std::vector<Row> t;
        auto add = [&](std::string name, Box box, double l, double bu, double bo, double minimum, Point argmin,
                       RawFn fn) {
            t.push_back({BenchmarkEntry{std::move(name), std::move(box), l, bu, bo, minimum, std::move(argmin)}, fn});
        };
        add("Branin", Box::cube(2, -15, 15), 0.5, 10, 100, 0.39788735772973816,
            vec({3.1415926464474566, 2.2749999803687144}), branin);
        add("Six-Hump-Camel", Box::cube(2, -2, 2), 0.5, 1, 100, -1.0316284534898774,
            vec({0.08984201181742917, -0.7126564056224669}), six_hump_camel);
        add("Beale", Box::cube(2, -4.5, 4.5), 1, 1, 100, 0.0, vec({3.0, 0.5}), beale);
        add("Bohachevsky-a", Box::cube(2, -35.5, 100), 1.7, 10, 10, 0.0, vec({0.0, 0.0}), bohachevsky1);
        add("Bohachevsky-b", Box::cube(2, -35.5, 100), 1.7, 10, 10, 0.0, vec({0.0, 0.0}), bohachevsky2);
        add("Bohachevsky-c", Box::cube(2, -35.5, 100), 1.7, 100, 10, 0.0, vec({0.0, 0.0}), bohachevsky3);
        add("Rosenbrock", Box::cube(2, -3, 3), 0.7, 1, 100, 0.0, vec({1.0, 1.0}), rosenbrock);
        add("Ackley", Box::cube(2, -12.5, 35), 3.5, 10, 10, 0.0, vec({0.0, 0.0}), ackley);
        add("Hartmann3", Box::cube(3, 0, 1), 0.3, 1, 10, -3.862779787332663,
            vec({0.11458887516898615, 0.5556488957292449, 0.8525469834205417}), hartmann3);
        add("Trid4", Box::cube(4, -16, 16), 10.75, 0.1, 100, -16.0, vec({4, 6, 6, 4}), trid);
        add("Shekel4", Box::cube(4, 0, 10), 1.75, 10, 10, -10.53644315348353,
            vec({4.000746866658956, 3.9995094808675886, 4.000746866997999, 3.9995094822423836}), shekel4);
        add("DixonPrice10", Box::cube(10, -10, 10), 2, 1, 10, 0.0, dixon_price_argmin(10), dixon_price);
        return t;
    }();
    return table;
}

const Row& find_row(std::string_view name) {
    static const std::vector<std::pair<std::string, std::string>> aliases = {
        {"sixhumpcamel", "sixhumpcamel"}, {"camel", "sixhumpcamel"},  {"hartmann", "hartmann3"},
        {"trid", "trid4"},                {"shekel", "shekel4"},      {"dixonprice", "dixonprice10"},
        {"bohachevsky1", "bohachevskya"}, {"bohachevsky2", "bohachevskyb"}, {"bohachevsky3", "bohachevskyc"}};
    std::string key = normalize(name);
    for (const auto& [from, to] : aliases) {
        if (key == from) key = to;
    }
    for (const auto& r : rows()) {
        if (normalize(r.entry.name) == key) return r;
    }
    throw UnknownNameError("unknown benchmark '" + std::string(name) + "'");
}

}  // namespace

double evaluate(const Objective& obj, const Point& x, RunClock& clock) {
    clock.pay_cost(obj.cost);
    double y = 0.0;
    try {
        y = clock.charge(Component::Objective, obj.eval_ops, [&] { return obj.fn(x); });
    } catch (const std::exception& e) {
        throw EvaluationError(obj.name + ": evaluation failed: " + e.what(), x);
    }
    if (std::isnan(y)) throw EvaluationError(obj.name + ": evaluation returned NaN", x);
    return y;
}

Objective with_cost(Objective obj, double c) {
    if (!(c >= 0.0)) throw std::invalid_argument("with_cost: cost must be >= 0");
    obj.cost += c;
    return obj;
}

Objective negated(Objective obj) {
    auto inner = std::move(obj.fn);
    obj.fn = [inner = std::move(inner)](const Point& x) { return -inner(x); };
    obj.known_best.reset();
    obj.known_argmax.reset();
    return obj;
}

const std::vector<BenchmarkEntry>& benchmark_table() {
    static const std::vector<BenchmarkEntry> entries = [] {
        std::vector<BenchmarkEntry> e;
        for (const auto& r : rows()) e.push_back(r.entry);
        return e;
    }();
    return entries;
}

const BenchmarkEntry& benchmark_entry(std::string_view name) { return find_row(name).entry; }

double benchmark_raw(std::string_view name, const Point& x) {
    const Row& r = find_row(name);
    if (static_cast<std::size_t>(x.size()) != r.entry.domain.dim()) {
        throw DimensionError(r.entry.name + ": expected dimension " + std::to_string(r.entry.domain.dim()));
    }
    return r.fn(x);
}

Objective benchmark(std::string_view name, std::optional<Box> domain) {
    const Row& r = find_row(name);
    Objective obj;
    obj.name = r.entry.name;
    obj.domain = domain ? *domain : r.entry.domain;
    if (obj.domain.dim() != r.entry.domain.dim()) throw DimensionError(obj.name + ": domain dimension mismatch");
    const std::size_t m = obj.domain.dim();
    obj.fn = [fn = r.fn, name = r.entry.name, m](const Point& x) {
        if (static_cast<std::size_t>(x.size()) != m) throw DimensionError(name + ": point dimension mismatch");
        return -fn(x);
    };
    if (obj.domain.contains(r.entry.argmin)) {
        obj.known_best = -r.entry.minimum;
        obj.known_argmax = r.entry.argmin;
    }
    obj.eval_ops = kBenchmarkOps;
    return obj;
}

KernelSpec benchmark_kernel(const BenchmarkEntry& entry) {
    return KernelSpec::matern(MaternNu::ThreeHalves, entry.lengthscale);
}

Box subsample_domain(const BenchmarkEntry& entry, std::uint64_t seed) {
    if (entry.argmin.size() == 0) throw std::invalid_argument(entry.name + ": subsampling needs a known minimizer");
    if (!entry.domain.contains(entry.argmin)) throw std::invalid_argument(entry.name + ": minimizer lies outside the domain");
    std::mt19937_64 rng(seed);
    Box box = entry.domain;
    for (std::size_t j = 0; j < entry.domain.dim(); ++j) {
        const auto k = static_cast<Eigen::Index>(j);
        const double lo = entry.domain.lower[k], hi = entry.domain.upper[k], xs = entry.argmin[k];
        box.lower[k] = std::uniform_real_distribution<double>(lo, xs)(rng);
        box.upper[k] = std::uniform_real_distribution<double>(xs, hi)(rng);
        box.lower[k] = std::min(box.lower[k], xs);
        box.upper[k] = std::max(box.upper[k], xs);
    }
    return box;
}

Objective sample_objective(std::shared_ptr<const GpSample> sample, const Box& domain) {
    if (!sample || sample->grid.empty()) throw std::invalid_argument("sample_objective: empty sample");
    Objective obj;
    obj.name = "gp_sample";
    obj.domain = domain;
    Eigen::Index best = 0;
    sample->values.maxCoeff(&best);
    obj.known_best = sample->values[best];
    obj.known_argmax = sample->grid[static_cast<std::size_t>(best)];
    obj.eval_ops = 4.0 * static_cast<double>(domain.dim());
    obj.fn = [sample = std::move(sample)](const Point& x) { return sample_eval(*sample, x); };
    return obj;
}

Objective on_model_objective(const KernelSpec& spec, const Box& domain, std::size_t resolution, std::uint64_t seed) {
    TensorGrid grid(domain, resolution);
    auto sample = std::make_shared<const GpSample>(sample_prior_tensor(spec, grid, seed));
    Objective obj = sample_objective(std::move(sample), domain);
    obj.name = "on_model";
    return obj;
}

std::pair<double, double> grid_range(const Objective& obj, std::size_t resolution) {
    const TensorGrid grid(obj.domain, resolution);
    if (grid.size() > 10'000'000) throw std::length_error("grid_range: grid exceeds 10^7 points");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = obj.fn(grid.point(i));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

std::string registry_csv() {
    std::ostringstream os;
    os << "name,dim,lower,upper,lengthscale,beta_ucb,beta_oo\n";
    for (const auto& e : benchmark_table()) {
        os << e.name << ',' << e.domain.dim() << ',' << format_double(e.domain.lower[0]) << ','
           << format_double(e.domain.upper[0]) << ',' << format_double(e.lengthscale) << ','
           << format_double(e.beta_ucb) << ',' << format_double(e.beta_oo) << '\n';
    }
    return os.str();
}

}  // namespace gpoo
