// Command-line front end: experiments, cost sweeps, the benchmark suite,
// theory self-checks and partition/registry dumps.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpoo/analysis.hpp"
#include "gpoo/csv.hpp"
#include "gpoo/harness.hpp"

namespace {

using namespace gpoo;
using nlohmann::ordered_json;

enum class Format { Csv, Json };

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> clock;
    std::string format = "csv";
};

ExperimentConfig load_config(const std::string& path, const Globals& g) {
    ConfigMap map = ConfigMap::load(path);
    if (g.seed) map.set("seeds", std::to_string(*g.seed));
    if (g.out) map.set("out", *g.out);
    if (g.clock) map.set("clock", *g.clock);
    return resolve_config(map);
}

ordered_json summary_json(const ExperimentConfig& cfg, const ExperimentSummary& s) {
    ordered_json j;
    j["config_hash"] = s.config_hash;
    j["out"] = cfg.out.string();
    j["runs"] = ordered_json::array();
    std::size_t k = 0;
    for (const auto& st : s.status) {
        ordered_json r;
        r["optimizer"] = optimizer_name(st.optimizer);
        r["seed"] = st.seed;
        r["ok"] = st.ok;
        if (st.ok) {
            const RunResult& run = s.runs[k++];
            r["evaluations"] = run.records.size();
            r["best_value"] = run.records.empty() ? 0.0 : run.records.back().best_value;
            if (!run.records.empty() && run.records.back().simple_regret) r["simple_regret"] = *run.records.back().simple_regret;
            r["total_ns"] = run.timing.total_ns;
        } else {
            r["error"] = st.error;
        }
        j["runs"].push_back(r);
    }
    return j;
}

void print_summary(const ExperimentConfig& cfg, const ExperimentSummary& s, Format f) {
    if (f == Format::Json) {
        std::cout << summary_json(cfg, s).dump(2) << '\n';
        return;
    }
    std::cout << "optimizer,seed,status,evaluations,simple_regret,total_ns\n";
    std::size_t k = 0;
    for (const auto& st : s.status) {
        std::cout << optimizer_name(st.optimizer) << ',' << st.seed << ',' << (st.ok ? "ok" : "failed");
        if (st.ok) {
            const RunResult& run = s.runs[k++];
            std::cout << ',' << run.records.size() << ',';
            if (!run.records.empty() && run.records.back().simple_regret) std::cout << format_double(*run.records.back().simple_regret);
            std::cout << ',' << run.timing.total_ns;
        } else {
            std::cout << ",,,";
        }
        std::cout << '\n';
    }
    for (const auto& st : s.status) {
        if (!st.ok) std::cerr << "run " << optimizer_name(st.optimizer) << " seed " << st.seed << " failed: " << st.error << '\n';
    }
}

int cmd_run(const std::string& path, const Globals& g, Format f) {
    const ExperimentConfig cfg = load_config(path, g);
    const auto s = run_experiment(cfg);
    print_summary(cfg, s, f);
    return s.exit_code();
}

int report_sweep(const ExperimentConfig& cfg, const std::vector<SweepResult>& results, const std::string& column, Format f) {
    int code = 0;
    ordered_json all = ordered_json::array();
    for (const auto& r : results) {
        code = std::max(code, r.summary.exit_code());
        if (f == Format::Json) {
            ordered_json j = summary_json(cfg, r.summary);
            j[column] = r.value;
            all.push_back(j);
        } else {
            std::cout << "# " << column << ' ' << format_double(r.value) << '\n';
            print_summary(cfg, r.summary, f);
        }
    }
    if (f == Format::Json) std::cout << all.dump(2) << '\n';
    return code;
}

int cmd_sweep(const std::string& path, const std::vector<double>& costs, const Globals& g, Format f) {
    const ExperimentConfig cfg = load_config(path, g);
    return report_sweep(cfg, sweep_costs(cfg, costs), "cost", f);
}

int cmd_sweep_count(const std::string& path, const std::vector<double>& counts, const Globals& g, Format f) {
    const ExperimentConfig cfg = load_config(path, g);
    return report_sweep(cfg, sweep_beta_count(cfg, counts), "count", f);
}

int cmd_bench(const std::string& suite, std::size_t budget, std::size_t seeds, const Globals& g, Format f) {
    if (suite != "table1") throw ConfigError("unknown suite '" + suite + "' (expected table1)");
    std::filesystem::path root = g.out ? std::filesystem::path(*g.out) : std::filesystem::path("gpoo_bench");
    if (!g.out) {
        if (const char* env = std::getenv("GPOO_OUT"); env && *env) root = std::filesystem::path(env) / "bench";
    }
    const std::uint64_t first = g.seed.value_or(0);
    int code = 0;
    std::size_t failed_benchmarks = 0;
    ordered_json report = ordered_json::array();
    if (f == Format::Csv) std::cout << "benchmark,optimizer,seed,status,simple_regret\n";
    for (const auto& e : benchmark_table()) {
        ConfigMap map;
        map.set("objective", e.name);
        map.set("optimizer", "gpoo,gpucb");
        map.set("budget", std::to_string(budget));
        map.set("seeds", std::to_string(first) + "-" + std::to_string(first + seeds - 1));
        map.set("out", (root / e.name).string());
        if (g.clock) map.set("clock", *g.clock);
        const ExperimentConfig cfg = resolve_config(map);
        const auto s = run_experiment(cfg);
        if (s.failures() == s.status.size()) ++failed_benchmarks;
        code = std::max(code, s.exit_code());
        std::size_t k = 0;
        for (const auto& st : s.status) {
            std::optional<double> regret;
            if (st.ok) {
                const auto& run = s.runs[k++];
                if (!run.records.empty()) regret = run.records.back().simple_regret;
            }
            if (f == Format::Json) {
                ordered_json j{{"benchmark", e.name}, {"optimizer", optimizer_name(st.optimizer)}, {"seed", st.seed}, {"ok", st.ok}};
                if (regret) j["simple_regret"] = *regret;
                if (!st.ok) j["error"] = st.error;
                report.push_back(j);
            } else {
                std::cout << e.name << ',' << optimizer_name(st.optimizer) << ',' << st.seed << ',' << (st.ok ? "ok" : "failed") << ','
                          << (regret ? format_double(*regret) : "") << '\n';
            }
        }
    }
    if (f == Format::Json) std::cout << report.dump(2) << '\n';
    return code;
}

int cmd_verify(const std::string& check, const Globals& g) {
    const auto results = verify_theory(check, g.seed.value_or(0));
    nlohmann::json j = results;
    std::cout << j.dump(2) << '\n';
    for (const auto& r : results) {
        if (!r.pass) return 1;
    }
    return 0;
}

int cmd_partition_dump(const std::string& path, const Globals& g, Format f) {
    const ExperimentConfig cfg = load_config(path, g);
    const auto cells = partition_dump(cfg);
    std::ostringstream os;
    if (f == Format::Json) {
        ordered_json arr = ordered_json::array();
        for (const auto& c : cells) {
            ordered_json j;
            j["depth"] = c.depth();
            j["lower"] = std::vector<double>(c.box.lower.begin(), c.box.lower.end());
            j["upper"] = std::vector<double>(c.box.upper.begin(), c.box.upper.end());
            j["center"] = std::vector<double>(c.center.begin(), c.center.end());
            j["delta"] = c.delta;
            arr.push_back(j);
        }
        os << arr.dump(2) << '\n';
    } else {
        os << partition_csv_header(cfg.domain.dim()) << '\n';
        for (const auto& c : cells) os << partition_csv_row(c) << '\n';
    }
    if (g.out) {
        std::filesystem::create_directories(*g.out);
        std::ofstream(std::filesystem::path(*g.out) / (f == Format::Json ? "partition.json" : "partition.csv")) << os.str();
    } else {
        std::cout << os.str();
    }
    return 0;
}

int cmd_registry(Format f) {
    if (f == Format::Csv) {
        std::cout << registry_csv();
        return 0;
    }
    ordered_json arr = ordered_json::array();
    for (const auto& e : benchmark_table()) {
        ordered_json j;
        j["name"] = e.name;
        j["dim"] = e.domain.dim();
        j["lower"] = std::vector<double>(e.domain.lower.begin(), e.domain.lower.end());
        j["upper"] = std::vector<double>(e.domain.upper.begin(), e.domain.upper.end());
        j["lengthscale"] = e.lengthscale;
        j["beta_ucb"] = e.beta_ucb;
        j["beta_oo"] = e.beta_oo;
        j["minimum"] = e.minimum;
        j["argmin"] = std::vector<double>(e.argmin.begin(), e.argmin.end());
        arr.push_back(j);
    }
    std::cout << arr.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GP-guided optimistic optimization experiments"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Single seed overriding the config's seed list");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--clock", g.clock, "Clock mode")->check(CLI::IsMember({"virtual", "real"}));
    app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run every (seed x optimizer) pair of a config");
    run->add_option("config", config_path, "Config file")->required();

    std::vector<double> costs{0.01, 0.1, 1.0, 10.0};
    auto* sweep = app.add_subcommand("sweep-costs", "Repeat a config over evaluation costs (virtual clock)");
    sweep->add_option("config", config_path, "Config file")->required();
    sweep->add_option("--costs", costs, "Costs in seconds per evaluation")->delimiter(',');

    std::vector<double> counts{1.0, 10.0, 100.0, 1000.0};
    auto* sweep_count = app.add_subcommand("sweep-beta-count", "Repeat a config over the GP-UCB beta count |X^|");
    sweep_count->add_option("config", config_path, "Config file")->required();
    sweep_count->add_option("--counts", counts, "Candidate-set sizes used inside beta")->delimiter(',');

    std::string suite;
    std::size_t budget = 500;
    std::size_t nseeds = 1;
    auto* bench = app.add_subcommand("bench", "Benchmark suite with tabulated hyperparameters");
    bench->add_option("--suite", suite, "Suite name")->required();
    bench->add_option("--budget", budget, "Evaluations per run")->check(CLI::PositiveNumber);
    bench->add_option("--seeds", nseeds, "Subsampled domains per benchmark")->check(CLI::PositiveNumber);

    std::string check;
    auto* verify = app.add_subcommand("verify-theory", "Numerical checks of the theoretical guarantees");
    verify->add_option("--check", check, "One of: envelope_se, envelope_matern, deviation, lemma3, prop1, prop2, hoelder, regret_guard");

    auto* pdump = app.add_subcommand("partition-dump", "Leaf cells of the GP-OO search tree");
    pdump->add_option("config", config_path, "Config file")->required();

    auto* rdump = app.add_subcommand("registry-dump", "List the benchmark registry");

    for (auto* sub : {run, sweep, sweep_count, bench, verify, pdump, rdump}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    const Format f = g.format == "json" ? Format::Json : Format::Csv;
    try {
        if (*run) return cmd_run(config_path, g, f);
        if (*sweep) return cmd_sweep(config_path, costs, g, f);
        if (*sweep_count) return cmd_sweep_count(config_path, counts, g, f);
        if (*bench) return cmd_bench(suite, budget, nseeds, g, f);
        if (*verify) return cmd_verify(check, g);
        if (*pdump) return cmd_partition_dump(config_path, g, f);
        if (*rdump) return cmd_registry(f);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
