#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "seqpred/harness/harness.hpp"

using namespace seqpred;
using namespace seqpred::harness;
namespace fs = std::filesystem;

namespace {

std::string config_error_field(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

std::string measure_error_field(const json& spec) {
    try {
        build_measure(spec, "true_measure");
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

const SeriesTable* find_series(const ExperimentReport& r, const std::string& name) {
    for (const auto& s : r.series) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("seqpred_harness_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Config, MinimalDocumentGetsDefaults) {
    const auto c = parse_config_text(R"({"schema_version": 1, "scenario": "nodom"})");
    EXPECT_EQ(c.scenario, "nodom");
    EXPECT_EQ(c.paths, 0u);
    EXPECT_EQ(c.seed, 1u);
    EXPECT_DOUBLE_EQ(c.eps, 0.5);
    EXPECT_FALSE(c.exact);
    EXPECT_FALSE(c.horizon.has_value());
    ASSERT_EQ(c.kinds.size(), 2u);
}

TEST(Config, RejectsBadDocuments) {
    EXPECT_EQ(config_error_field(R"({"schema_version": 1, "scenario": "nodom", "bogus": 1})"),
              "bogus");
    EXPECT_EQ(config_error_field(R"({"schema_version": 2, "scenario": "nodom"})"), "schema_version");
    EXPECT_EQ(config_error_field(R"({"scenario": "nodom"})"), "schema_version");
    EXPECT_EQ(config_error_field(R"({"schema_version": 1, "scenario": "nope"})"), "scenario");
    EXPECT_EQ(config_error_field(R"({"schema_version": 1, "scenario": "nodom", "kinds": []})"),
              "kinds");
    EXPECT_EQ(config_error_field(
                  R"({"schema_version": 1, "scenario": "nodom", "kinds": ["KL", "L2"]})"),
              "kinds[1]");
    EXPECT_EQ(config_error_field(R"({"schema_version": 1, "scenario": "nodom", "eps": 1.0})"), "eps");
    EXPECT_EQ(config_error_field(
                  R"({"schema_version": 1, "scenario": "nodom", "schedule": "WEEKLY"})"),
              "schedule");
    EXPECT_EQ(config_error_field(R"({"schema_version": 1, "scenario": "nodom", "paths": -3})"),
              "paths");
    EXPECT_EQ(config_error_field(
                  R"({"schema_version": 1, "scenario": "nodom", "output": {"dir": "x", "y": 1}})"),
              "output.y");
}

TEST(Config, ScheduleAcceptsNameOrList) {
    const auto named = parse_config_text(
        R"({"schema_version": 1, "scenario": "nodom", "schedule": "CUBIC"})");
    ASSERT_TRUE(named.schedule.has_value());
    EXPECT_TRUE(named.schedule->contains(27));
    EXPECT_FALSE(named.schedule->contains(28));
    const auto listed = parse_config_text(
        R"({"schema_version": 1, "scenario": "nodom", "schedule": [3, 10, 50]})");
    ASSERT_TRUE(listed.schedule.has_value());
    EXPECT_EQ(listed.schedule->count_up_to(49), 2u);
    EXPECT_EQ(schedule_to_json(*listed.schedule, 100), json({3, 10, 50}));
}

TEST(MeasureSpec, BuildsEveryType) {
    const json bern = {{"type", "bernoulli"}, {"p", 0.25}};
    const History one = {1};
    EXPECT_NEAR(build_measure(bern, "m").marginal_log(one).prob(), 0.25, 1e-15);

    const json mk = {{"type", "markov"}, {"order", 1}, {"table", {{0.9, 0.1}, {0.3, 0.7}}}};
    const History x = {0, 1, 1};
    EXPECT_NEAR(build_measure(mk, "m").marginal_log(x).prob(), 0.5 * 0.1 * 0.7, 1e-15);

    const json mix = {{"type", "mixture"},
                      {"components",
                       {{{"weight", 0.5}, {"measure", {{"type", "bernoulli"}, {"p", 0.2}}}},
                        {{"weight", 0.5}, {"measure", {{"type", "laplace"}}}}}}};
    // 0.5 * 0.2 * 0.2 + 0.5 * 1/3
    const History ones = {1, 1};
    EXPECT_NEAR(build_measure(mix, "m").marginal_log(ones).prob(), 0.02 + 1.0 / 6.0, 1e-15);

    const json cont = {{"type", "contaminate"},
                       {"rho", {{"type", "point_mass"}, {"symbol", 0}}},
                       {"chi", {{"type", "bernoulli"}, {"p", 0.5}}}};
    EXPECT_NEAR(build_measure(cont, "m").marginal_log(ones).prob(), 0.125, 1e-15);

    const json sched = {{"type", "scheduled"},
                        {"base", {{"type", "point_mass"}, {"symbol", 1}}},
                        {"schedule", "POW2"},
                        {"probs", {0.5, 0.5}}};
    EXPECT_NEAR(build_measure(sched, "m").marginal_log(History(8, 1)).prob(), 0.125, 1e-15);

    const json tri = {{"type", "bernoulli"}, {"probs", {0.2, 0.5, 0.3}}};
    EXPECT_EQ(build_measure(tri, "m").alphabet().size(), 3u);
    EXPECT_EQ(build_measure({{"type", "ryabko"}, {"k_max", 2}}, "m").alphabet().size(), 2u);
    EXPECT_EQ(build_measure({{"type", "markov_laplace"}, {"order", 2}}, "m").alphabet().size(), 2u);
}

TEST(MeasureSpec, ErrorsNameTheOffendingField) {
    EXPECT_EQ(measure_error_field({{"type", "bernoulli"}, {"p", 1.5}}), "true_measure.p");
    EXPECT_EQ(measure_error_field({{"type", "gaussian"}}), "true_measure.type");
    EXPECT_EQ(measure_error_field({{"type", "laplace"}, {"colour", 1}}), "true_measure.colour");
    const json missing = {{"type", "mixture"},
                          {"components",
                           {{{"weight", 1.0}, {"measure", {{"type", "bernoulli"}, {"q", 0.1}}}}}}};
    EXPECT_EQ(measure_error_field(missing), "true_measure.components[0].measure.probs");
    const json extra = {
        {"type", "contaminate"},
        {"rho", {{"type", "laplace"}}},
        {"chi", {{"type", "bernoulli"}, {"p", 0.1}, {"q", 0.2}}}};
    EXPECT_EQ(measure_error_field(extra), "true_measure.chi.q");
}

TEST(Run, EmptySeriesWithoutPathsOrExact) {
    const auto cfg = parse_config_text(R"({
        "schema_version": 1, "scenario": "custom", "horizon": 50,
        "true_measure": {"type": "bernoulli", "p": 0.3}, "predictor": {"type": "laplace"}})");
    const auto r = run_experiment(cfg);
    EXPECT_TRUE(r.series.empty());
    EXPECT_TRUE(r.complete);
    EXPECT_TRUE(r.all_pass());
}

TEST(Run, LaplaceVsBernoulliReportsBoundAndExactSeries) {
    const auto cfg = parse_config_text(R"({
        "schema_version": 1, "scenario": "laplace_vs_bernoulli", "exact": true,
        "p_grid": [0.3], "kinds": ["KL"], "horizon": 14})");
    const auto r = run_experiment(cfg);
    ASSERT_TRUE(r.complete);
    const SeriesTable* bound = find_series(r, "bound");
    ASSERT_NE(bound, nullptr);
    ASSERT_EQ(bound->running_average.size(), 14u);
    for (std::size_t n = 1; n <= 14; ++n) {
        EXPECT_DOUBLE_EQ(bound->running_average[n - 1], std::log(n + 1.0) / static_cast<double>(n));
    }
    const SeriesTable* kl = find_series(r, "p0.3_KL_exact");
    ASSERT_NE(kl, nullptr);
    // E d_1 = KL(0.3 || 0.5)
    const double d1 = 0.3 * std::log(0.3 / 0.5) + 0.7 * std::log(0.7 / 0.5);
    EXPECT_NEAR(kl->running_average[0], d1, 1e-15);
    ASSERT_EQ(r.verdicts.size(), 1u);
    EXPECT_EQ(r.verdicts[0].id, "expected-kl-bound");
    EXPECT_TRUE(r.verdicts[0].pass);
}

TEST(Run, OverBudgetIsIncomplete) {
    const auto cfg = parse_config_text(R"({
        "schema_version": 1, "scenario": "laplace_vs_bernoulli", "exact": true,
        "budget_leaves": 1000})");
    const auto r = run_experiment(cfg);
    EXPECT_FALSE(r.complete);
    EXPECT_FALSE(r.notes.empty());
    EXPECT_EQ(r.to_json()["status"], "INCOMPLETE");
    EXPECT_NE(find_series(r, "bound"), nullptr);
}

TEST(Run, MissingPredictorForCustomIsConfigError) {
    const auto cfg = parse_config_text(R"({
        "schema_version": 1, "scenario": "custom", "horizon": 5,
        "true_measure": {"type": "bernoulli", "p": 0.3}})");
    EXPECT_THROW(run_experiment(cfg), ConfigError);
}

TEST(Run, NosumadRoutesAgree) {
    const auto cfg = parse_config_text(R"({
        "schema_version": 1, "scenario": "nosumad", "horizons": [4, 16, 256]})");
    const auto r = run_experiment(cfg);
    ASSERT_FALSE(r.verdicts.empty());
    EXPECT_TRUE(r.all_pass());
    const SeriesTable* chain = find_series(r, "contaminated_conditional_chain_rule");
    const SeriesTable* closed = find_series(r, "contaminated_conditional_closed_form");
    ASSERT_NE(chain, nullptr);
    ASSERT_NE(closed, nullptr);
    ASSERT_EQ(chain->size(), 3u);
    EXPECT_NEAR(chain->per_step[0], 0.56, 1e-12);
    EXPECT_NEAR(chain->per_step[1], 50.0 / 153.0, 1e-12);
    EXPECT_NEAR(closed->per_step[2], (1.0 / 257 + 1.0 / 128) / (1.0 / 256 + 1.0 / 8), 1e-12);
}

TEST(Run, NodomCountsScheduledSteps) {
    const auto cfg = parse_config_text(R"({
        "schema_version": 1, "scenario": "nodom", "horizon": 1024, "kinds": ["KL", "ABS"]})");
    const auto r = run_experiment(cfg);
    ASSERT_FALSE(r.verdicts.empty());
    EXPECT_TRUE(r.all_pass());
}

TEST(Report, CsvLayoutAndReproducibleBytes) {
    const auto cfg = parse_config_text(R"({
        "schema_version": 1, "scenario": "custom", "horizon": 200, "paths": 16, "seed": 9,
        "true_measure": {"type": "markov", "order": 1, "table": [[0.9, 0.1], [0.3, 0.7]]},
        "predictor": {"type": "ryabko", "k_max": 2}, "kinds": ["KL", "ABS"]})");
    const fs::path a = scratch("repro_a");
    const fs::path b = scratch("repro_b");
    const auto fa = write_report(run_experiment(cfg), a, "x");
    const auto fb = write_report(run_experiment(cfg), b, "x");
    ASSERT_EQ(fa.size(), fb.size());
    std::size_t csvs = 0;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        if (fa[i].extension() != ".csv") continue;
        ++csvs;
        const std::string text = slurp(fa[i]);
        EXPECT_EQ(text.rfind("n,per_step,running_average,stderr\n", 0), 0u);
        EXPECT_EQ(text, slurp(fb[i]));
    }
    EXPECT_EQ(csvs, 2u);
    const json rep = json::parse(slurp(a / "x_report.json"));
    EXPECT_EQ(rep["config"]["seed"], 9);
    EXPECT_TRUE(rep["stats"].contains("wall_seconds"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Report, VerdictCarriesToleranceAndClaim) {
    const Verdict v = make_verdict("id-x", "claim-x", "desc", 0.5, "<=", 0.4, 0.2);
    EXPECT_TRUE(v.pass);
    const json j = v.to_json();
    EXPECT_EQ(j["claim"], "claim-x");
    EXPECT_DOUBLE_EQ(j["tolerance"].get<double>(), 0.2);
    EXPECT_FALSE(make_verdict("i", "c", "d", 0.7, "<=", 0.4, 0.2).pass);
    EXPECT_FALSE(make_verdict("i", "c", "d", 0.4, "<", 0.4, 0.0).pass);
    EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(Verify, SuitesPassAndUnknownIsRejected) {
    for (const char* s : {"chain_rule", "mixture_dominance", "laplace_bound"}) {
        const auto r = verify_suite(s);
        EXPECT_FALSE(r.verdicts.empty()) << s;
        EXPECT_TRUE(r.all_pass()) << s;
    }
    EXPECT_THROW(verify_suite("nope"), ConfigError);
}

TEST(Sweep, ScheduleByKindGridGivesFourPoints) {
    const json templ = {{"schema_version", 1}, {"scenario", "nodom"}, {"horizon", 256}};
    const json grid = {{"schedule", {"POW2", "CUBIC"}}, {"kinds", {"ABS", "KL"}}};
    const auto res = run_sweep(templ, grid);
    ASSERT_EQ(res.reports.size(), 4u);
    // keys in sorted order, last key varying fastest
    EXPECT_EQ(res.points[1].coordinates["kinds"], "ABS");
    EXPECT_EQ(res.points[1].coordinates["schedule"], "CUBIC");
    EXPECT_EQ(res.points[2].coordinates["kinds"], "KL");
    EXPECT_EQ(res.points[2].coordinates["schedule"], "POW2");
    EXPECT_EQ(res.aggregate_csv.rfind(
                  "point,kinds,schedule,series,kind,route,n,running_average,stderr,status\n", 0),
              0u);
    for (const auto& r : res.reports) EXPECT_TRUE(r.complete);
    for (int p = 0; p < 4; ++p) {
        EXPECT_NE(res.aggregate_csv.find("\n" + std::to_string(p) + ","), std::string::npos);
    }
}

TEST(Sweep, DottedKeysReachNestedSpecs) {
    json doc = {{"predictor", {{"type", "ryabko"}}}};
    set_dotted(doc, "predictor.k_max", 4);
    set_dotted(doc, "output.dir", "d");
    EXPECT_EQ(doc["predictor"]["k_max"], 4);
    EXPECT_EQ(doc["output"]["dir"], "d");
    json scalar = {{"seed", 1}};
    EXPECT_THROW(set_dotted(scalar, "seed.x", 2), ConfigError);
}

TEST(Sweep, InvalidPointsFailBeforeRunning) {
    const json templ = {{"schema_version", 1}, {"scenario", "nodom"}};
    try {
        run_sweep(templ, {{"kinds", {json::array()}}});
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "grid point 0: kinds");
    }
    EXPECT_THROW(run_sweep(templ, json::object()), ConfigError);
    EXPECT_THROW(run_sweep(templ, {{"seed", json::array()}}), ConfigError);
}

TEST(Probe, ZeroBudgetIsEmpty) {
    ProbeOptions opt;
    opt.budget = 0;
    const auto r = probe_conjecture(1, opt);
    EXPECT_TRUE(r.extra["instances"].empty());
    EXPECT_EQ(r.extra["outcome"], "no counterexample found within budget");
    EXPECT_TRUE(r.verdicts.empty());
    EXPECT_TRUE(r.series.empty());
}

TEST(Probe, SeedInstancesAndNoVerdicts) {
    ProbeOptions opt;
    opt.budget = 2;
    opt.horizon = 2000;
    opt.paths = 4;
    const auto r1 = probe_conjecture(1, opt);
    ASSERT_EQ(r1.extra["instances"].size(), 2u);
    EXPECT_EQ(r1.extra["instances"][0]["label"], "nosumad triple");
    EXPECT_EQ(r1.extra["instances"][1]["label"], "nosumavad triple");
    // rho = nosumavad rho predicts in average but not per step, so the premise fails there
    EXPECT_EQ(r1.extra["instances"][1]["premise"], "INAPPLICABLE");
    EXPECT_TRUE(r1.verdicts.empty());
    const std::string dump = r1.to_json().dump();
    EXPECT_EQ(dump.find("confirmed"), std::string::npos);

    const auto r3 = probe_conjecture(3, opt);
    EXPECT_EQ(r3.extra["instances"][0]["premise"], "APPLICABLE");
    EXPECT_TRUE(r3.verdicts.empty());
    EXPECT_THROW(probe_conjecture(4, opt), ConfigError);
}
