#include "gpoo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gpoo/csv.hpp"

namespace gpoo {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (auto& part : split_csv_line(s)) {
        auto t = trim(part);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Typed access with key-specific error messages.
class Reader {
public:
    explicit Reader(const ConfigMap& m) : map_(m) {}

    std::optional<std::string> str(const std::string& key) {
        used_.push_back(key);
        return map_.get(key);
    }

    std::optional<double> number(const std::string& key) {
        auto v = str(key);
        if (!v) return std::nullopt;
        try {
            return parse_double(*v);
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': expected a number, got '" + *v + "'");
        }
    }

    std::optional<std::size_t> count(const std::string& key) {
        auto v = number(key);
        if (!v) return std::nullopt;
        if (*v < 0 || *v != std::floor(*v)) throw ConfigError("config key '" + key + "': expected a nonnegative integer");
        return static_cast<std::size_t>(*v);
    }

    std::optional<bool> flag(const std::string& key) {
        auto v = str(key);
        if (!v) return std::nullopt;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ConfigError("config key '" + key + "': expected true|false");
    }

    std::optional<std::vector<double>> numbers(const std::string& key) {
        auto v = str(key);
        if (!v) return std::nullopt;
        std::vector<double> out;
        for (const auto& part : split_list(*v)) {
            try {
                out.push_back(parse_double(part));
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key + "': bad number '" + part + "'");
            }
        }
        return out;
    }

    void reject_unknown() const {
        for (const auto& [k, v] : map_.values()) {
            if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
                throw ConfigError("unknown config key '" + k + "'");
            }
        }
    }

private:
    const ConfigMap& map_;
    std::vector<std::string> used_;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    for (const auto& part : split_list(text)) {
        const auto dash = part.find('-', 1);
        try {
            if (dash == std::string::npos) {
                seeds.push_back(std::stoull(part));
            } else {
                const auto lo = std::stoull(part.substr(0, dash));
                const auto hi = std::stoull(part.substr(dash + 1));
                if (hi < lo) throw ConfigError("seed range '" + part + "' is empty");
                for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("bad seed list entry '" + part + "'");
        }
    }
    if (seeds.empty()) throw ConfigError("seeds: list is empty");
    return seeds;
}

std::string join_doubles(const Point& p) {
    std::string s;
    for (Eigen::Index i = 0; i < p.size(); ++i) s += (i ? "," : "") + format_double(p[i]);
    return s;
}

bool is_benchmark(const std::string& name) {
    if (name == "on_model") return false;
    try {
        (void)benchmark_entry(name);
        return true;
    } catch (const UnknownNameError&) {
        return false;
    }
}

std::string trace_name(Optimizer o, std::uint64_t seed) {
    return std::string(optimizer_name(o)) + "_seed" + std::to_string(seed) + ".csv";
}

}  // namespace

ConfigMap ConfigMap::parse(const std::string& text) {
    ConfigMap m;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (m.has(key)) throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        m.set(key, trim(t.substr(eq + 1)));
    }
    return m;
}

ConfigMap ConfigMap::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::optional<std::string> ConfigMap::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string ConfigMap::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

std::string config_hash(const ConfigMap& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string_view optimizer_name(Optimizer o) {
    switch (o) {
        case Optimizer::Gpoo: return "gpoo";
        case Optimizer::Gpucb: return "gpucb";
        case Optimizer::Random: return "random";
    }
    return "?";
}

Optimizer optimizer_from_name(std::string_view name) {
    if (name == "gpoo") return Optimizer::Gpoo;
    if (name == "gpucb") return Optimizer::Gpucb;
    if (name == "random") return Optimizer::Random;
    throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected gpoo|gpucb|random)");
}

ConfigMap ExperimentConfig::to_map() const {
    ConfigMap m;
    std::string opts;
    for (auto o : optimizers) opts += (opts.empty() ? "" : ",") + std::string(optimizer_name(o));
    m.set("optimizer", opts);
    m.set("objective", objective);
    m.set("objective.subsample", subsample ? "true" : "false");
    nlohmann::json kj = kernel;
    for (const auto& [k, v] : kj.items()) m.set("kernel." + k, v.is_string() ? v.get<std::string>() : format_double(v.get<double>()));
    m.set("domain.lower", join_doubles(domain.lower));
    m.set("domain.upper", join_doubles(domain.upper));
    m.set("grid.resolution", std::to_string(grid_resolution));
    m.set("budget", std::to_string(budget));
    m.set("epsilon", format_double(epsilon));
    m.set("beta.mode", std::string(beta_mode_name(beta_mode)));
    m.set("beta.value", format_double(beta_value));
    m.set("beta.horizon", std::to_string(beta_horizon));
    m.set("beta.cell_count", format_double(beta_cell_count));
    m.set("partition", partition.mode == SplitMode::RegularLongestSide ? "regular" : "optimized");
    m.set("partition.resolution", std::to_string(partition.resolution));
    m.set("ucb.grid_resolution", std::to_string(ucb_grid_resolution));
    m.set("ucb.beta_count", ucb_beta_count ? format_double(*ucb_beta_count) : "grid");
    if (ucb_beta) m.set("ucb.beta", format_double(*ucb_beta));
    m.set("ucb.noise", format_double(ucb_noise));
    m.set("ucb.variance_form", ucb_variance_form ? "true" : "false");
    m.set("ucb.budget", std::to_string(ucb_budget));
    if (gpoo_budget) m.set("gpoo.budget", std::to_string(*gpoo_budget));
    if (random_budget) m.set("random.budget", std::to_string(*random_budget));
    m.set("cost", format_double(cost));
    std::string s;
    for (auto seed : seeds) s += (s.empty() ? "" : ",") + std::to_string(seed);
    m.set("seeds", s);
    m.set("clock", std::string(clock_mode_name(clock)));
    m.set("ns_per_op", format_double(ns_per_op));
    m.set("out", out.string());
    m.set("workers", std::to_string(workers));
    return m;
}

ExperimentConfig resolve_config(const ConfigMap& map) {
    Reader r(map);
    ExperimentConfig c;
    if (const char* env = std::getenv("GPOO_OUT"); env && *env) c.out = env;

    if (auto v = r.str("optimizer")) {
        c.optimizers.clear();
        for (const auto& name : split_list(*v)) c.optimizers.push_back(optimizer_from_name(name));
        if (c.optimizers.empty()) throw ConfigError("optimizer: list is empty");
    }
    if (auto v = r.str("objective")) c.objective = *v;
    const bool bench = is_benchmark(c.objective);
    if (!bench && c.objective != "on_model") throw ConfigError("unknown objective '" + c.objective + "'");
    const BenchmarkEntry* entry = bench ? &benchmark_entry(c.objective) : nullptr;
    if (entry) {
        c.objective = entry->name;
        c.kernel = benchmark_kernel(*entry);
        c.domain = entry->domain;
        c.epsilon = 0.05;
        c.beta_mode = BetaMode::Fixed;
        c.beta_value = entry->beta_oo;
        c.ucb_beta = entry->beta_ucb;
        c.subsample = true;
    }
    if (auto v = r.flag("objective.subsample")) c.subsample = *v;

    nlohmann::json kj = c.kernel;
    bool kernel_given = false;
    for (const char* key : {"family", "lengthscale", "variance", "nu", "bias", "shape"}) {
        auto v = r.str(std::string("kernel.") + key);
        if (!v) continue;
        kernel_given = true;
        if (std::string(key) == "family") {
            if (family_from_name(*v) != c.kernel.family) kj = nlohmann::json{{"family", *v}};
            else kj["family"] = *v;
        } else {
            try {
                kj[key] = parse_double(*v);
            } catch (const std::exception&) {
                throw ConfigError(std::string("config key 'kernel.") + key + "': expected a number");
            }
        }
    }
    if (kernel_given) {
        try {
            c.kernel = kj.get<KernelSpec>();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("kernel: ") + e.what());
        }
    }

    auto lower = r.numbers("domain.lower");
    auto upper = r.numbers("domain.upper");
    auto dim = r.count("domain.dim");
    if (lower || upper || dim) {
        const std::size_t m = dim ? *dim : std::max(lower ? lower->size() : 0, upper ? upper->size() : 0);
        auto expand = [&](const std::optional<std::vector<double>>& v, const Point& fallback, const char* key) {
            if (!v) {
                if (static_cast<std::size_t>(fallback.size()) == m) return fallback;
                throw ConfigError(std::string("config key '") + key + "' required for this dimension");
            }
            if (v->size() == 1) return Point::Constant(static_cast<Eigen::Index>(m), v->front()).eval();
            if (v->size() != m) throw ConfigError(std::string("config key '") + key + "': wrong number of entries");
            return Point(Eigen::Map<const Point>(v->data(), static_cast<Eigen::Index>(m)));
        };
        const Point lo = expand(lower, c.domain.lower, "domain.lower");
        const Point hi = expand(upper, c.domain.upper, "domain.upper");
        try {
            c.domain = Box(lo, hi);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("domain: ") + e.what());
        }
        if (c.domain.degenerate()) throw ConfigError("domain: degenerate box");
        if (entry && c.domain.dim() != entry->domain.dim()) throw ConfigError("domain: dimension differs from benchmark");
    }

    if (auto v = r.count("grid.resolution")) c.grid_resolution = *v;
    if (c.grid_resolution < 2) throw ConfigError("grid.resolution must be >= 2");
    if (auto v = r.count("budget")) c.budget = *v;
    if (c.budget < 1) throw ConfigError("budget must be >= 1");
    if (auto v = r.number("epsilon")) c.epsilon = *v;
    if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");

    if (auto v = r.str("beta.mode")) {
        try {
            c.beta_mode = beta_mode_from_name(*v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (auto v = r.number("beta.value")) c.beta_value = *v;
    if (auto v = r.count("beta.horizon")) c.beta_horizon = *v;
    if (auto v = r.number("beta.cell_count")) c.beta_cell_count = *v;

    if (auto v = r.str("partition")) {
        if (*v == "regular") c.partition.mode = SplitMode::RegularLongestSide;
        else if (*v == "optimized") c.partition.mode = SplitMode::GreedyKCenter;
        else throw ConfigError("partition: expected regular|optimized");
    }
    if (auto v = r.count("partition.resolution")) c.partition.resolution = *v;

    const std::size_t m = c.domain.dim();
    if (entry) {
        // Largest per-axis resolution keeping the candidate grid at most 4096 points.
        std::size_t res = 2;
        while (std::pow(static_cast<double>(res + 1), static_cast<double>(m)) <= 4096.0) ++res;
        c.ucb_grid_resolution = res;
    } else {
        c.ucb_grid_resolution = c.grid_resolution;
    }
    if (auto v = r.count("ucb.grid_resolution")) c.ucb_grid_resolution = *v;
    if (auto v = r.str("ucb.beta_count")) {
        if (*v == "grid") c.ucb_beta_count.reset();
        else c.ucb_beta_count = r.number("ucb.beta_count");
    }
    if (auto v = r.number("ucb.beta")) c.ucb_beta = *v;
    if (auto v = r.number("ucb.noise")) c.ucb_noise = *v;
    if (auto v = r.flag("ucb.variance_form")) c.ucb_variance_form = *v;
    if (auto v = r.count("ucb.budget")) c.ucb_budget = *v;
    if (c.ucb_budget > UcbConfig::kMaxBudget) throw ConfigError("ucb.budget exceeds 2000");
    if (auto v = r.count("gpoo.budget")) c.gpoo_budget = *v;
    if (auto v = r.count("random.budget")) c.random_budget = *v;

    if (auto v = r.number("cost")) c.cost = *v;
    if (!(c.cost >= 0.0)) throw ConfigError("cost must be >= 0");
    if (auto v = r.str("seeds")) c.seeds = parse_seeds(*v);
    if (auto v = r.str("clock")) {
        try {
            c.clock = clock_mode_from_name(*v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (auto v = r.number("ns_per_op")) c.ns_per_op = *v;
    if (auto v = r.str("out")) c.out = *v;
    if (auto v = r.count("workers")) c.workers = std::max<std::size_t>(1, *v);
    r.reject_unknown();

    if (c.objective == "on_model") {
        const double pts = std::pow(static_cast<double>(c.grid_resolution), static_cast<double>(m));
        if (pts > 10'000.0) throw ConfigError("grid.resolution^dim exceeds the 10^4 sampling limit");
        if (c.kernel.family == KernelFamily::Wiener && (c.domain.lower.array() < 0.0).any()) {
            throw ConfigError("Wiener kernel needs a nonnegative domain");
        }
    }
    return c;
}

Objective make_objective(const ExperimentConfig& config, std::uint64_t seed) {
    Objective obj;
    if (config.objective == "on_model") {
        obj = on_model_objective(config.kernel, config.domain, config.grid_resolution, seed);
    } else {
        const BenchmarkEntry& e = benchmark_entry(config.objective);
        std::optional<Box> box;
        if (config.subsample) box = subsample_domain(BenchmarkEntry{e.name, config.domain, e.lengthscale, e.beta_ucb, e.beta_oo, e.minimum, e.argmin}, seed);
        else box = config.domain;
        obj = benchmark(config.objective, box);
    }
    return with_cost(std::move(obj), config.cost);
}

RunResult run_single(const ExperimentConfig& config, Optimizer optimizer, std::uint64_t seed) {
    const Objective obj = make_objective(config, seed);
    RunResult r;
    switch (optimizer) {
        case Optimizer::Gpoo: {
            GpooConfig g{config.kernel, {}, {}};
            g.beta.mode = config.beta_mode;
            g.beta.horizon = config.beta_horizon;
            g.beta.epsilon = config.epsilon;
            g.beta.value = config.beta_value;
            if (config.beta_mode == BetaMode::Theory) {
                const TensorGrid grid(obj.domain, config.grid_resolution);
                g.beta.cell_count = [grid](const Cell& c) { return static_cast<double>(grid.count_inside(c.box)); };
            } else {
                const double n = config.beta_cell_count;
                g.beta.cell_count = [n](const Cell&) { return n; };
            }
            g.options.scheme = config.partition;
            g.options.budget = config.gpoo_budget ? *config.gpoo_budget : config.budget;
            g.options.clock = config.clock;
            g.options.ns_per_op = config.ns_per_op;
            r = run_gpoo(obj, g);
            break;
        }
        case Optimizer::Gpucb: {
            UcbConfig u;
            u.kernel = config.kernel;
            u.grid = ucb_grid(obj.domain, config.ucb_grid_resolution);
            u.beta_count = config.ucb_beta_count;
            u.epsilon = config.epsilon;
            u.noise = config.ucb_noise;
            u.fixed_beta = config.ucb_beta;
            u.variance_form = config.ucb_variance_form;
            u.budget = std::min(config.budget, config.ucb_budget);
            u.clock = config.clock;
            u.ns_per_op = config.ns_per_op;
            r = run_gpucb(obj, u);
            break;
        }
        case Optimizer::Random: {
            RandomConfig rc;
            rc.seed = splitmix64(seed);
            rc.budget = config.random_budget ? *config.random_budget : config.budget;
            rc.clock = config.clock;
            rc.ns_per_op = config.ns_per_op;
            r = run_random(obj, rc);
            break;
        }
    }
    r.seed = seed;
    r.config_hash = config.hash();
    return r;
}

std::size_t ExperimentSummary::failures() const {
    return static_cast<std::size_t>(std::count_if(status.begin(), status.end(), [](const RunStatus& s) { return !s.ok; }));
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile: empty data");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || v[lo] == v[hi]) return v[lo];
    if (!std::isfinite(v[hi])) return v[hi];
    return v[lo] + frac * (v[hi] - v[lo]);
}

double median_regret_at_step(const std::vector<RunResult>& runs, std::size_t n) {
    std::vector<double> vals;
    for (const auto& r : runs) {
        if (!r.known_best) throw std::invalid_argument("median_regret_at_step: run without optimum");
        vals.push_back(*r.known_best - best_after(r.records, n));
    }
    return quantile(vals, 0.5);
}

double median_regret_at_time(const std::vector<RunResult>& runs, std::int64_t t) {
    std::vector<double> vals;
    for (const auto& r : runs) {
        if (!r.known_best) throw std::invalid_argument("median_regret_at_time: run without optimum");
        const auto b = best_at_time(r.records, t);
        vals.push_back(b ? *r.known_best - *b : std::numeric_limits<double>::infinity());
    }
    return quantile(vals, 0.5);
}

std::vector<AggregateRow> aggregate_runs(const std::vector<RunResult>& runs) {
    std::vector<AggregateRow> rows;
    std::vector<std::pair<std::string, std::string>> groups;
    for (const auto& r : runs) {
        if (!r.known_best || r.records.empty()) continue;
        std::pair<std::string, std::string> key{r.optimizer, r.objective};
        if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
    }
    static constexpr std::pair<const char*, double> stats[] = {{"median", 0.5}, {"q25", 0.25}, {"q75", 0.75}};

    for (const auto& [opt, objname] : groups) {
        std::vector<const RunResult*> members;
        for (const auto& r : runs) {
            if (r.optimizer == opt && r.objective == objname && r.known_best && !r.records.empty()) members.push_back(&r);
        }
        std::size_t longest = 0;
        std::int64_t t_lo = std::numeric_limits<std::int64_t>::max(), t_hi = 0;
        for (const auto* r : members) {
            longest = std::max(longest, r->records.size());
            t_lo = std::min(t_lo, std::max<std::int64_t>(1, r->records.front().elapsed_ns));
            t_hi = std::max(t_hi, r->records.back().elapsed_ns);
        }
        for (std::size_t n = 1; n <= longest; ++n) {
            std::vector<double> vals;
            for (const auto* r : members) {
                if (r->records.size() >= n) vals.push_back(*r->records[n - 1].simple_regret);
            }
            for (const auto& [name, q] : stats) {
                rows.push_back({opt, objname, name, "evaluations", static_cast<double>(n), quantile(vals, q)});
            }
        }
        constexpr int kTimePoints = 64;
        t_hi = std::max(t_hi, t_lo);
        const double l0 = std::log(static_cast<double>(t_lo)), l1 = std::log(static_cast<double>(t_hi));
        for (int k = 0; k < kTimePoints; ++k) {
            const double lt = l0 + (l1 - l0) * static_cast<double>(k) / (kTimePoints - 1);
            const auto t = k == kTimePoints - 1 ? t_hi : static_cast<std::int64_t>(std::llround(std::exp(lt)));
            std::vector<double> vals;
            for (const auto* r : members) {
                const auto b = best_at_time(r->records, t);
                vals.push_back(b ? *r->known_best - *b : std::numeric_limits<double>::infinity());
            }
            for (const auto& [name, q] : stats) {
                const double v = quantile(vals, q);
                if (std::isfinite(v)) rows.push_back({opt, objname, name, "time", static_cast<double>(t) * 1e-9, v});
            }
        }
    }
    return rows;
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "optimizer,objective,stat,x_axis,x,value\n";
    for (const auto& r : rows) {
        os << r.optimizer << ',' << r.objective << ',' << r.stat << ',' << r.x_axis << ',' << format_double(r.x) << ','
           << format_double(r.value) << '\n';
    }
}

namespace {

nlohmann::ordered_json timing_json(const RunResult& r) {
    nlohmann::ordered_json j;
    j["optimizer"] = r.optimizer;
    j["seed"] = r.seed;
    for (std::size_t c = 0; c < kComponentCount; ++c) {
        j[std::string(component_name(static_cast<Component>(c))) + "_ns"] = r.timing.ns[c];
    }
    j["total_ns"] = r.timing.total_ns;
    j["evaluations"] = r.records.size();
    return j;
}

void write_outputs(const ExperimentConfig& config, const ExperimentSummary& s) {
    const fs::path root = config.out;
    fs::create_directories(root / "traces");
    {
        std::ofstream f(root / "config.resolved");
        f << "# config hash " << s.config_hash << "\n" << config.to_map().canonical();
    }
    std::ofstream manifest(root / "manifest.csv");
    manifest << "optimizer,objective,seed,config_hash,status,known_best,trace,error\n";
    std::size_t k = 0;
    for (const auto& st : s.status) {
        std::string known;
        std::string objname = config.objective;
        if (st.ok) {
            const RunResult& r = s.runs[k++];
            objname = r.objective;
            if (r.known_best) known = format_double(*r.known_best);
            std::ofstream t(root / "traces" / st.trace.filename());
            write_trace_csv(t, r.records, config.domain.dim());
        }
        std::string err = st.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        manifest << optimizer_name(st.optimizer) << ',' << objname << ',' << st.seed << ',' << s.config_hash << ','
                 << (st.ok ? "ok" : "failed") << ',' << known << ',' << (st.ok ? "traces/" + st.trace.filename().string() : "")
                 << ',' << err << '\n';
    }
    {
        std::ofstream f(root / "aggregate.csv");
        write_aggregate_csv(f, s.aggregate);
    }
    nlohmann::ordered_json timing;
    timing["clock"] = clock_mode_name(config.clock);
    timing["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : s.runs) timing["runs"].push_back(timing_json(r));
    std::ofstream(root / "timing.json") << timing.dump(2) << '\n';
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config, bool write) {
    struct Job {
        Optimizer optimizer;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (auto seed : config.seeds) {
        for (auto o : config.optimizers) jobs.push_back({o, seed});
    }
    std::vector<std::optional<RunResult>> results(jobs.size());
    std::vector<std::string> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                results[i] = run_single(config, jobs[i].optimizer, jobs[i].seed);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const std::size_t nworkers = std::min(config.workers, jobs.size());
    if (nworkers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    }

    ExperimentSummary s;
    s.config_hash = config.hash();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        RunStatus st{jobs[i].optimizer, jobs[i].seed, results[i].has_value(), errors[i],
                     config.out / "traces" / trace_name(jobs[i].optimizer, jobs[i].seed)};
        s.status.push_back(st);
        if (results[i]) s.runs.push_back(std::move(*results[i]));
    }
    s.aggregate = aggregate_runs(s.runs);
    if (write) write_outputs(config, s);
    return s;
}

std::vector<AggregateRow> aggregate_from_disk(const fs::path& dir) {
    std::ifstream manifest(dir / "manifest.csv");
    if (!manifest) throw std::invalid_argument("aggregate_from_disk: no manifest in " + dir.string());
    std::string line;
    std::getline(manifest, line);
    std::vector<RunResult> runs;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        const auto c = split_csv_line(line);
        if (c.size() < 8) throw std::invalid_argument("aggregate_from_disk: bad manifest row");
        if (c[4] != "ok") continue;
        RunResult r;
        r.optimizer = c[0];
        r.objective = c[1];
        r.seed = std::stoull(c[2]);
        r.config_hash = c[3];
        if (!c[5].empty()) r.known_best = parse_double(c[5]);
        std::ifstream t(dir / c[6]);
        if (!t) throw std::invalid_argument("aggregate_from_disk: missing trace " + c[6]);
        r.records = read_trace_csv(t);
        runs.push_back(std::move(r));
    }
    return aggregate_runs(runs);
}

namespace {

std::vector<SweepResult> sweep(const ExperimentConfig& base, const std::vector<double>& values, const std::string& column,
                               const std::function<void(ExperimentConfig&, double)>& apply, bool write) {
    std::vector<SweepResult> out;
    for (double v : values) {
        ExperimentConfig cfg = base;
        apply(cfg, v);
        cfg.out = base.out / (column + "_" + format_double(v));
        out.push_back({v, run_experiment(cfg, write)});
    }
    if (write) {
        fs::create_directories(base.out);
        std::ofstream f(base.out / "sweep.csv");
        f << column << ",optimizer,objective,stat,x_axis,x,value\n";
        for (const auto& s : out) {
            for (const auto& r : s.summary.aggregate) {
                f << format_double(s.value) << ',' << r.optimizer << ',' << r.objective << ',' << r.stat << ','
                  << r.x_axis << ',' << format_double(r.x) << ',' << format_double(r.value) << '\n';
            }
        }
    }
    return out;
}

}  // namespace

std::vector<SweepResult> sweep_costs(const ExperimentConfig& base, const std::vector<double>& costs, bool write) {
    if (base.clock != ClockMode::Virtual) throw ConfigError("sweep-costs requires the virtual clock");
    return sweep(base, costs, "cost", [](ExperimentConfig& c, double v) { c.cost = v; }, write);
}

std::vector<SweepResult> sweep_beta_count(const ExperimentConfig& base, const std::vector<double>& counts, bool write) {
    for (double n : counts) {
        if (!(n >= 1.0)) throw ConfigError("beta count must be >= 1");
    }
    return sweep(base, counts, "count", [](ExperimentConfig& c, double v) { c.ucb_beta_count = v; }, write);
}

double step_time_exponent(const std::vector<RunRecord>& records, std::size_t lo, std::size_t hi) {
    std::vector<double> xs, ys;
    for (std::size_t n = std::max<std::size_t>(lo, 2); n <= hi && n <= records.size(); ++n) {
        const auto dt = records[n - 1].elapsed_ns - records[n - 2].elapsed_ns;
        if (dt <= 0) continue;
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(static_cast<double>(dt)));
    }
    if (xs.size() < 2) throw std::invalid_argument("step_time_exponent: not enough steps");
    const double k = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

std::vector<Cell> partition_dump(const ExperimentConfig& config) {
    const Objective obj = make_objective(config, config.seeds.front());
    GpooConfig g{config.kernel, {}, {}};
    g.beta.mode = config.beta_mode;
    g.beta.horizon = config.beta_horizon;
    g.beta.epsilon = config.epsilon;
    g.beta.value = config.beta_value;
    if (config.beta_mode == BetaMode::Theory) {
        const TensorGrid grid(obj.domain, config.grid_resolution);
        g.beta.cell_count = [grid](const Cell& c) { return static_cast<double>(grid.count_inside(c.box)); };
    } else {
        const double n = config.beta_cell_count;
        g.beta.cell_count = [n](const Cell&) { return n; };
    }
    g.options.scheme = config.partition;
    g.options.budget = config.gpoo_budget ? *config.gpoo_budget : config.budget;
    g.options.clock = config.clock;
    g.options.keep_leaves = true;
    return run_gpoo(obj, g).leaves;
}

}  // namespace gpoo
