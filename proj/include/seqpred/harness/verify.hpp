#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "seqpred/harness/scenarios.hpp"
#include "seqpred/rng.hpp"

namespace seqpred::harness {

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "pinsker", "laplace_bound", "chain_rule", "mixture_dominance", "counterexamples",
        "expected_bounds", "ryabko_trend", "all"};
    return names;
}

namespace detail {

inline std::string file_stem(const std::string& s) {
    std::string out;
    for (char ch : s) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.') ? ch : '_';
    return out;
}

inline std::vector<double> random_dist(const CounterRng& rng, std::uint64_t stream,
                                       std::uint64_t& counter, std::size_t q, bool allow_zero) {
    std::vector<double> p(q);
    double sum = 0.0;
    for (auto& v : p) {
        v = -std::log1p(-rng.uniform(stream, counter++));
        sum += v;
    }
    if (allow_zero && rng.uniform(stream, counter++) < 0.1) {
        const auto k = static_cast<std::size_t>(rng.uniform(stream, counter++) * static_cast<double>(q));
        sum -= p[k];
        p[k] = 0.0;
    }
    for (auto& v : p) v /= sum;
    return p;
}

inline void verify_pinsker(ExperimentReport& r, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const CounterRng rng(seed);
    constexpr std::size_t kCases = 100000;
    std::size_t bad_a = 0, bad_s = 0, bad_h = 0, infinite = 0;
    double min_slack = kInf;
    for (std::size_t i = 0; i < kCases; ++i) {
        std::uint64_t counter = 0;
        const std::size_t q = 2 + static_cast<std::size_t>(rng.uniform(i, counter++) * 7.0);
        const auto mu = random_dist(rng, i, counter, q, true);
        const auto rho = random_dist(rng, i, counter, q, true);
        const double d = step_divergence(DivergenceKind::KL, mu, rho);
        const double a = step_divergence(DivergenceKind::ABS, mu, rho);
        const double s = step_divergence(DivergenceKind::SQ, mu, rho);
        const double h = step_divergence(DivergenceKind::HELLINGER, mu, rho);
        const double tol = kPinskerTolerance * (1.0 + 2.0 * std::abs(d));
        if (std::isinf(d)) ++infinite;
        if (!pinsker_holds(a, d)) ++bad_a;
        if (s > d + tol) ++bad_s;
        if (h > d + tol) ++bad_h;
        if (std::isfinite(d)) min_slack = std::min(min_slack, 2.0 * d - a * a);
    }
    r.extra["pinsker_cases"] = kCases;
    r.extra["pinsker_infinite_kl_cases"] = infinite;
    r.extra["pinsker_min_slack"] = json_number(min_slack);
    r.add(make_verdict("pinsker-a", "pinsker-chain", "random pairs violating a^2 <= 2d (of 10^5)",
                       static_cast<double>(bad_a), "==", 0.0, 0.0));
    r.add(make_verdict("pinsker-s", "pinsker-chain", "random pairs violating s <= d (of 10^5)",
                       static_cast<double>(bad_s), "==", 0.0, 0.0));
    r.add(make_verdict("pinsker-h", "pinsker-chain", "random pairs violating h <= d (of 10^5)",
                       static_cast<double>(bad_h), "==", 0.0, 0.0));

    const Measure mu = make_markov(Alphabet::binary(), 1, {{0.9, 0.1}, {0.3, 0.7}}, {0.75, 0.25});
    const Measure rho = laplace(Alphabet::binary());
    const DivergenceKind kinds[2] = {DivergenceKind::KL, DivergenceKind::ABS};
    std::size_t bad_paths = 0;
    SeriesTable worst;
    worst.name = "pinsker_path_slack";
    worst.kind = "2*dbar-abar^2";
    worst.route = "path_minimum";
    worst.running_average.assign(1000, kInf);
    for (std::size_t p = 0; p < 1000; ++p) {
        const History x = sample_path(mu, seed, 1000, p);
        const auto ser = path_series(kinds, mu, rho, x);
        const PinskerVerdict v = pinsker_audit(ser[0], ser[1]);
        if (!v.ok) ++bad_paths;
        for (std::size_t t = 0; t < 1000; ++t) {
            const double abar = ser[1].running_average[t];
            worst.running_average[t] =
                std::min(worst.running_average[t], 2.0 * ser[0].running_average[t] - abar * abar);
        }
    }
    r.series.push_back(std::move(worst));
    r.add(make_verdict("pinsker-averaged", "pinsker-chain",
                       "sampled paths (10^3 of length 10^3) violating abar^2 <= 2 dbar or a^2 <= 2d",
                       static_cast<double>(bad_paths), "==", 0.0, 0.0));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.extra["pinsker_seconds"] = secs;
    r.add(make_verdict("pinsker-runtime", "pinsker-chain", "suite runtime in seconds", secs, "<",
                       30.0, 0.0));
}

inline void verify_laplace_bound(ExperimentReport& r, std::uint64_t budget) {
    const Alphabet bin = Alphabet::binary();
    const Measure l = laplace(bin);
    constexpr std::size_t kN = 12;
    double min_slack = kInf;
    SeriesTable min_ratio;
    min_ratio.name = "laplace_min_ratio";
    min_ratio.kind = "c_n";
    min_ratio.route = "exact";
    min_ratio.per_step.assign(kN, kInf);
    for (int i = 0; i <= 100; ++i) {
        const auto prof = dominance_profile_exact(l, make_bernoulli(i / 100.0), kN, budget);
        for (std::size_t n = 1; n <= kN; ++n) {
            min_slack = std::min(min_slack, prof.c(n) - laplace_bound(n, 2));
            min_ratio.per_step[n - 1] = std::min(min_ratio.per_step[n - 1], prof.c(n));
        }
    }
    r.series.push_back(std::move(min_ratio));
    r.add(make_verdict("laplace-binary", "laplace-dominance",
                       "min over p-grid, n <= 12, x of rho_L(x)/mu_p(x) - 1/(n+1)", min_slack,
                       ">=", 0.0, 1e-12));

    const auto sharp = dominance_profile_exact(l, make_bernoulli(1.0), kN, budget);
    double gap = 0.0;
    std::size_t wrong_witness = 0;
    for (std::size_t n = 1; n <= kN; ++n) {
        gap = std::max(gap, std::abs(sharp.c(n) - laplace_bound(n, 2)));
        if (sharp.witness[n - 1] != History(n, 1)) ++wrong_witness;
    }
    r.add(make_verdict("laplace-sharp", "laplace-dominance",
                       "at p = 1 the ratio on x = 1^n equals 1/(n+1)", gap, "<=", 0.0, 1e-12));
    r.add(make_verdict("laplace-sharp-witness", "laplace-dominance",
                       "lengths n <= 12 whose minimizing string at p = 1 is not 1^n",
                       static_cast<double>(wrong_witness), "==", 0.0, 0.0));

    const Alphabet tri(3);
    const Measure l3 = laplace(tri);
    double tri_slack = kInf;
    for (int a = 0; a <= 10; ++a) {
        for (int b = 0; a + b <= 10; ++b) {
            const int c = 10 - a - b;
            const auto prof = dominance_profile_exact(
                l3, make_bernoulli(tri, {a / 10.0, b / 10.0, c / 10.0}), 7, budget);
            for (std::size_t n = 1; n <= 7; ++n) {
                tri_slack = std::min(tri_slack, prof.c(n) - laplace_bound(n, 3));
            }
        }
    }
    r.add(make_verdict("laplace-ternary", "laplace-dominance",
                       "min over a simplex grid, n <= 7 of rho_L(x)/mu(x) - n!/(n+2)!", tri_slack,
                       ">=", 0.0, 1e-12));
}

inline void verify_chain_rule(ExperimentReport& r, std::uint64_t budget) {
    constexpr std::size_t kN = 14;
    double worst = 0.0;
    for (const auto& pair : builtin_pairs()) {
        const auto kl = expected_average_exact_series(DivergenceKind::KL, pair.mu, pair.rho, kN,
                                                      budget);
        const auto lr = expected_log_ratio_series(pair.mu, pair.rho, kN, budget);
        double diff = 0.0;
        for (std::size_t t = 0; t < kN; ++t) {
            if (std::isinf(kl[t]) && std::isinf(lr[t])) continue;
            diff = std::max(diff, std::abs(kl[t] - lr[t]));
        }
        if (std::isnan(diff)) diff = kInf;
        worst = std::max(worst, diff);
        r.extra["chain_rule"][pair.name] = json_number(diff);
        SeriesTable t;
        t.name = "chain_rule_" + file_stem(pair.name);
        t.kind = "KL";
        t.route = "exact";
        t.running_average = kl;
        r.series.push_back(std::move(t));
    }
    r.add(make_verdict("chain-rule", "chain-rule",
                       "max |per-step E dbar_n - (1/n) E log(mu/rho)| over the roster, n <= 14",
                       worst, "<=", 0.0, 1e-9));
}

inline void verify_mixture_dominance(ExperimentReport& r, std::uint64_t budget) {
    const auto comps = builtin_mixture_components();
    const Measure xi = bayes_mixture(comps);
    double slack = kInf;
    for (const auto& c : comps) {
        enumerate_pair(
            c.measure, xi, 10,
            [&](const History& x, const Tracker& nu, const Tracker& m) {
                if (x.empty()) return;
                slack = std::min(slack,
                                 m.log_marginal().prob() - c.weight * nu.log_marginal().prob());
            },
            budget, false);
    }
    r.add(make_verdict("mixture-dominance", "mixture-dominance",
                       "min over components and binary x with |x| <= 10 of xi(x) - w_i nu_i(x)",
                       slack, ">=", 0.0, 1e-12));
}

inline void merge(ExperimentReport& into, const std::string& tag, ExperimentReport&& from) {
    for (auto& s : from.series) {
        s.name = tag + "_" + s.name;
        into.series.push_back(std::move(s));
    }
    for (auto& v : from.verdicts) into.verdicts.push_back(std::move(v));
    if (!from.extra.empty()) into.extra[tag] = std::move(from.extra);
    for (auto& n : from.notes) into.notes.push_back(tag + ": " + n);
    into.complete = into.complete && from.complete;
}

inline ExperimentConfig scenario_config(json doc) {
    doc["schema_version"] = kSchemaVersion;
    return parse_config(doc);
}

inline void verify_counterexamples(ExperimentReport& r, std::uint64_t seed) {
    {
        auto rep = run_experiment(scenario_config(
            {{"scenario", "nodom"}, {"schedule", "POW2"}, {"horizon", 1024}, {"kinds", {"KL", "ABS"}}}));
        const double dbar = rep.extra["dbar_N"].get<double>();
        const auto count = rep.extra["scheduled_steps"].get<std::size_t>();
        merge(r, "nodom", std::move(rep));
        r.add(make_verdict("nodom-count", "nodom-exhibit", "scheduled steps up to 1024",
                           static_cast<double>(count), "==", 10.0, 0.0));
        r.add(make_verdict("nodom-dbar", "nodom-exhibit", "dbar_1024 on the all-ones path", dbar,
                           "<=", 0.007, 0.0));
    }
    {
        auto rep = run_experiment(scenario_config({{"scenario", "nosumad"},
                                                   {"horizons", {4, 16, 256, 65536}},
                                                   {"horizon", 256},
                                                   {"kinds", {"KL", "ABS"}}}));
        merge(r, "nosumad", std::move(rep));
    }
    {
        auto rep = run_experiment(scenario_config({{"scenario", "nosumavad"},
                                                   {"schedule", "CUBIC"},
                                                   {"horizon", 10000},
                                                   {"paths", 200},
                                                   {"seed", seed},
                                                   {"kinds", {"ABS"}}}));
        merge(r, "nosumavad", std::move(rep));
    }
}

// Numerical stand-in for "tends to 0": finite and strictly decreasing over
// the last `tail` horizons.
inline bool tail_decreasing(const std::vector<double>& v, std::size_t tail = 4) {
    if (v.size() < tail || !std::isfinite(v.back())) return false;
    for (std::size_t i = v.size() - tail + 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return true;
}

inline void verify_expected_bounds(ExperimentReport& r, std::uint64_t budget) {
    const Measure l = laplace(Alphabet::binary());
    constexpr std::size_t kN = 14;
    double worst = -kInf;
    std::size_t tail_rises = 0;
    std::vector<double> sup(kN, -kInf);
    for (int i = 0; i <= 100; ++i) {
        const auto e = expected_average_exact_series(DivergenceKind::KL, make_bernoulli(i / 100.0),
                                                     l, kN, budget);
        for (std::size_t n = 1; n <= kN; ++n) {
            worst = std::max(worst, e[n - 1] - std::log(n + 1.0) / static_cast<double>(n));
            sup[n - 1] = std::max(sup[n - 1], e[n - 1]);
            if (n > 8 && e[n - 1] > e[n - 2]) ++tail_rises;
        }
    }
    double sup_rise = -kInf;
    for (std::size_t n = 1; n < kN; ++n) sup_rise = std::max(sup_rise, sup[n] - sup[n - 1]);
    SeriesTable t;
    t.name = "expected_kl_sup_over_grid";
    t.kind = "KL";
    t.route = "exact";
    t.running_average = sup;
    r.series.push_back(std::move(t));
    r.add(make_verdict("expected-kl-bound", "expected-kl-bound",
                       "max over p-grid, n <= 14 of E dbar_n(mu_p, rho_L) - log(n+1)/n", worst,
                       "<=", 0.0, 1e-12));
    r.add(make_verdict("expected-kl-trend-sup", "expected-kl-bound",
                       "largest change of max_p E dbar_n between consecutive n", sup_rise, "<",
                       0.0, 0.0));
    r.add(make_verdict("expected-kl-trend-tail", "expected-kl-bound",
                       "(p, n) with 8 < n <= 14 where E dbar_n exceeds E dbar_{n-1}",
                       static_cast<double>(tail_rises), "==", 0.0, 0.0));

    // contaminating a predictor costs at most log 2 / n in expected average KL
    const Measure chi = make_bernoulli(0.9);
    constexpr std::size_t kBinaryN = 20;
    double add_worst = -kInf;
    std::size_t checked = 0;
    std::size_t mix_not_trending = 0;
    for (const auto& pair : builtin_pairs()) {
        const std::size_t n_max = pair.mu.alphabet().size() == 2 ? kBinaryN : kN;
        const auto d_rho =
            expected_average_exact_series(DivergenceKind::KL, pair.mu, pair.rho, n_max, budget);
        if (!tail_decreasing(d_rho)) continue;
        ++checked;
        Measure bin_chi = chi;
        if (!(pair.mu.alphabet() == chi.alphabet())) {
            std::vector<double> probs(pair.mu.alphabet().size(), 0.1);
            probs.front() = 1.0 - 0.1 * static_cast<double>(probs.size() - 1);
            bin_chi = make_bernoulli(pair.mu.alphabet(), probs);
        }
        const Measure mix = contaminate(pair.rho, bin_chi);
        const auto d_mix =
            expected_average_exact_series(DivergenceKind::KL, pair.mu, mix, n_max, budget);
        for (std::size_t n = 1; n <= n_max; ++n) {
            add_worst = std::max(add_worst, d_mix[n - 1] - d_rho[n - 1] -
                                                std::log(2.0) / static_cast<double>(n));
        }
        if (!tail_decreasing(d_mix)) ++mix_not_trending;
        r.extra["contamination"][pair.name] = {{"E_dbar_rho", d_rho.back()},
                                               {"E_dbar_contaminated", d_mix.back()}};
    }
    r.extra["contamination_pairs_checked"] = checked;
    r.add(make_verdict("contamination-additive", "contamination-additive",
                       "max over roster pairs, n <= 20 (binary) or 14, of "
                       "E dbar_n(mix) - E dbar_n(rho) - log2/n",
                       add_worst, "<=", 0.0, 1e-12));
    r.add(make_verdict("contamination-trend", "contamination-additive",
                       "roster pairs whose contaminated E dbar_n is not decreasing "
                       "over the last 4 exact horizons",
                       static_cast<double>(mix_not_trending), "==", 0.0, 0.0));
}

inline void verify_ryabko_trend(ExperimentReport& r, std::uint64_t seed) {
    auto rep = run_experiment(scenario_config({{"scenario", "ryabko_stationary"},
                                               {"k_max", 8},
                                               {"horizons", {10, 100, 1000}},
                                               {"paths", 500},
                                               {"seed", seed},
                                               {"kinds", {"KL"}}}));
    merge(r, "ryabko", std::move(rep));
}

}  // namespace detail

inline ExperimentReport verify_suite(const std::string& suite, std::uint64_t seed = 1,
                                     std::uint64_t budget = kDefaultLeafBudget) {
    bool known = false;
    for (const auto& s : suite_names()) known = known || s == suite;
    if (!known) throw ConfigError("suite", "unknown verification suite '" + suite + "'");
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport r;
    r.scenario = "verify:" + suite;
    r.config = {{"suite", suite}, {"seed", seed}, {"budget_leaves", budget}};
    r.budget_leaves = budget;
    const bool all = suite == "all";
    try {
        if (all || suite == "pinsker") detail::verify_pinsker(r, seed);
        if (all || suite == "laplace_bound") detail::verify_laplace_bound(r, budget);
        if (all || suite == "chain_rule") detail::verify_chain_rule(r, budget);
        if (all || suite == "mixture_dominance") detail::verify_mixture_dominance(r, budget);
        if (all || suite == "expected_bounds") detail::verify_expected_bounds(r, budget);
        if (all || suite == "counterexamples") detail::verify_counterexamples(r, seed);
        if (all || suite == "ryabko_trend") detail::verify_ryabko_trend(r, seed);
    } catch (const BudgetExceeded& e) {
        r.complete = false;
        r.notes.push_back(e.what());
    }
    r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace seqpred::harness
