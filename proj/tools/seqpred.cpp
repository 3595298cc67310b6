#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "seqpred/harness/harness.hpp"

namespace fs = std::filesystem;
using namespace seqpred;
using namespace seqpred::harness;

namespace {

enum Exit { kOk = 0, kAssertion = 1, kConfig = 2, kBudget = 3 };

struct Flags {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> paths;
    std::optional<std::uint64_t> horizon;
    std::optional<std::uint64_t> budget_leaves;
    std::string out_dir;
    bool quiet = false;
};

json read_json(const std::string& path, const std::string& what) {
    std::ifstream f(path);
    if (!f) throw ConfigError(what, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(what, std::string("not valid JSON: ") + e.what());
    }
}

fs::path resolve_out_dir(const Flags& flags, const std::string& from_config) {
    if (!flags.out_dir.empty()) return flags.out_dir;
    if (!from_config.empty()) return from_config;
    if (const char* env = std::getenv("SEQPRED_OUT_DIR"); env && *env) return env;
    return "seqpred_out";
}

void apply_flags(json& doc, const Flags& flags) {
    if (flags.seed) doc["seed"] = *flags.seed;
    if (flags.paths) doc["paths"] = *flags.paths;
    if (flags.horizon) doc["horizon"] = *flags.horizon;
    if (flags.budget_leaves) doc["budget_leaves"] = *flags.budget_leaves;
}

int status_of(const ExperimentReport& r) {
    if (!r.all_pass()) return kAssertion;
    if (!r.complete) return kBudget;
    return kOk;
}

void summarize(const ExperimentReport& r, const std::vector<fs::path>& files, bool quiet) {
    if (quiet) return;
    std::cout << r.scenario << ": " << (r.complete ? "COMPLETE" : "INCOMPLETE") << "\n";
    for (const auto& v : r.verdicts) {
        std::cout << "  " << (v.pass ? "PASS" : "FAIL") << "  " << v.id << "  measured "
                  << format_double(v.measured) << " " << v.relation << " "
                  << format_double(v.threshold) << " (tol " << format_double(v.tolerance)
                  << ")\n";
    }
    for (const auto& n : r.notes) std::cout << "  note: " << n << "\n";
    if (r.extra.contains("outcome")) std::cout << "  " << r.extra["outcome"].get<std::string>() << "\n";
    std::cout << "  report: " << files.back().string() << "\n";
}

int cmd_run(const std::string& config_path, const Flags& flags) {
    json doc = read_json(config_path, "<config>");
    apply_flags(doc, flags);
    const ExperimentConfig cfg = parse_config(doc);
    const ExperimentReport r = run_experiment(cfg);
    const fs::path dir = resolve_out_dir(flags, cfg.output.dir);
    const std::string prefix = cfg.output.prefix.empty() ? cfg.scenario : cfg.output.prefix;
    summarize(r, write_report(r, dir, prefix), flags.quiet);
    return status_of(r);
}

int cmd_verify(const std::string& suite, const Flags& flags) {
    const ExperimentReport r = verify_suite(suite, flags.seed.value_or(1),
                                            flags.budget_leaves.value_or(kDefaultLeafBudget));
    summarize(r, write_report(r, resolve_out_dir(flags, ""), "verify_" + suite), flags.quiet);
    return status_of(r);
}

int cmd_sweep(const std::string& templ_path, const std::string& grid_path, const Flags& flags) {
    json templ = read_json(templ_path, "<template>");
    apply_flags(templ, flags);
    const json grid = read_json(grid_path, "<grid>");
    const SweepResult res = run_sweep(templ, grid);
    const fs::path dir = resolve_out_dir(flags, "");
    int status = kOk;
    for (std::size_t i = 0; i < res.reports.size(); ++i) {
        const auto& r = res.reports[i];
        const auto files = write_report(r, dir / ("point_" + std::to_string(i)), r.scenario);
        if (!flags.quiet) std::cout << "point " << i << " " << res.points[i].coordinates.dump() << "\n";
        summarize(r, files, flags.quiet);
        const int s = status_of(r);
        if (s == kAssertion || (s == kBudget && status == kOk)) status = s;
    }
    write_text(dir / "sweep_aggregate.csv", res.aggregate_csv);
    if (!flags.quiet) std::cout << "aggregate: " << (dir / "sweep_aggregate.csv").string() << "\n";
    return status;
}

int cmd_probe(int which, std::uint64_t budget, const Flags& flags) {
    ProbeOptions opt;
    opt.budget = budget;
    if (flags.seed) opt.seed = *flags.seed;
    if (flags.paths) opt.paths = *flags.paths;
    if (flags.horizon) opt.horizon = *flags.horizon;
    const ExperimentReport r = probe_conjecture(which, opt);
    summarize(r, write_report(r, resolve_out_dir(flags, ""), "probe_" + std::to_string(which)),
              flags.quiet);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seqpred: sequence prediction experiments and verification suites"};
    app.require_subcommand(1);
    Flags flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", flags.seed, "random seed");
        sub->add_option("--out-dir", flags.out_dir,
                        "output directory (default: $SEQPRED_OUT_DIR or ./seqpred_out)");
        sub->add_option("--budget-leaves", flags.budget_leaves, "exact enumeration leaf budget");
        sub->add_option("--paths", flags.paths, "Monte Carlo paths");
        sub->add_option("--horizon", flags.horizon, "horizon N");
        sub->add_flag("-q,--quiet", flags.quiet, "print nothing on success");
    };

    std::string config_path;
    auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
    run->add_option("config", config_path, "config file")->required();
    add_common(run);

    std::string suite;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite, "suite name")
        ->required()
        ->check(CLI::IsMember(suite_names()));
    add_common(verify);

    std::string templ_path, grid_path;
    auto* sweep = app.add_subcommand("sweep", "run a config template over a parameter grid");
    sweep->add_option("template", templ_path, "config template")->required();
    sweep->add_option("grid", grid_path, "grid file: dotted key -> list of values")->required();
    add_common(sweep);

    int which = 0;
    std::uint64_t probe_budget = 100;
    auto* probe = app.add_subcommand("probe", "search for counterexamples to an open statement");
    probe->add_option("conjecture", which, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
    probe->add_option("--budget", probe_budget, "number of random instances");
    add_common(probe);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run) return cmd_run(config_path, flags);
        if (*verify) return cmd_verify(suite, flags);
        if (*sweep) return cmd_sweep(templ_path, grid_path, flags);
        if (*probe) return cmd_probe(which, probe_budget, flags);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kConfig;
    } catch (const BudgetExceeded& e) {
        std::cerr << e.what() << "\n";
        return kBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
    return kOk;
}
