#pragma once

#include <algorithm>
#include <chrono>
#include <string>
#include <vector>

#include "seqpred/harness/scenarios.hpp"
#include "seqpred/rng.hpp"

namespace seqpred::harness {

// Randomized search for instances that break one of the open statements:
//   1  rho predicts mu in absolute distance => (rho+chi)/2 predicts mu in average absolute distance
//   2  rho predicts mu in average KL => (rho+chi)/2 predicts mu in average KL
//   3  a mixture predicts i.i.d. sources in absolute distance and
//      stationary sources in average KL
// A probe either finds candidates or reports that none was found; it never
// declares a statement true.
struct ProbeOptions {
    std::size_t budget = 100;  // number of instances
    std::size_t horizon = 10000;
    std::size_t paths = 8;
    std::uint64_t seed = 1;
    double premise_tolerance = 0.1;
    double candidate_threshold = 0.1;
};

namespace detail {

class Draw {
public:
    Draw(std::uint64_t seed, std::uint64_t stream) : rng_(seed), stream_(stream) {}
    double uniform() { return rng_.uniform(stream_, counter_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t pick(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
    }

private:
    CounterRng rng_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

inline Measure random_source(Draw& d, bool iid_only) {
    const Alphabet bin = Alphabet::binary();
    if (iid_only || d.uniform() < 0.5) return make_bernoulli(d.uniform(0.05, 0.95));
    const double a = d.uniform(0.05, 0.95);
    const double b = d.uniform(0.05, 0.95);
    // stationary start for the transition matrix {{1-a, a}, {b, 1-b}}
    return make_markov(bin, 1, {{1 - a, a}, {b, 1 - b}}, {b / (a + b), a / (a + b)});
}

inline Measure random_predictor(Draw& d, const Measure& mu) {
    const Alphabet bin = Alphabet::binary();
    switch (d.pick(5)) {
        case 0: return laplace(bin);
        case 1: return markov_laplace(bin, 1);
        case 2: return ryabko_mixture(bin, 3);
        case 3: return contaminate(mu, make_bernoulli(d.uniform(0.0, 1.0)), d.uniform(0.1, 0.9));
        default: {
            const double p = d.uniform(0.0, 1.0);
            return make_schedule_measure(mu, StepSchedule::pow2(), ConditionalDist{1 - p, p});
        }
    }
}

inline Measure random_contaminant(Draw& d, const Measure& mu) {
    const Alphabet bin = Alphabet::binary();
    switch (d.pick(5)) {
        case 0: return make_bernoulli(d.uniform(0.0, 1.0));
        case 1: return make_constant_point_mass(bin, static_cast<Symbol>(d.pick(2)));
        case 2: return random_source(d, false);
        case 3: {
            const Symbol s = static_cast<Symbol>(d.pick(2));
            return make_schedule_measure(mu, StepSchedule::double_exp(),
                                         ConditionalDist::point(2, s));
        }
        default: return markov_laplace(bin, 2);
    }
}

inline Measure random_mixture(Draw& d) {
    const Alphabet bin = Alphabet::binary();
    std::vector<MixtureComponent> comps = {
        {laplace(bin), 0.3}, {markov_laplace(bin, 1), 0.2}, {ryabko_mixture(bin, 3), 0.2}};
    comps.push_back({make_bernoulli(d.uniform(0.0, 1.0)), 0.15});
    comps.push_back({make_constant_point_mass(bin, static_cast<Symbol>(d.pick(2))), 0.15});
    return bayes_mixture(comps, "probe_mixture");
}

struct Instance {
    std::string label;
    Measure mu;
    Measure rho;
    std::optional<Measure> chi;
};

inline double tail_max(const std::vector<double>& v) {
    double m = -kInf;
    for (std::size_t t = v.size() / 2; t < v.size(); ++t) m = std::max(m, v[t]);
    return m;
}

}  // namespace detail

inline ExperimentReport probe_conjecture(int which, const ProbeOptions& opt) {
    if (which < 1 || which > 3) throw ConfigError("conjecture", "expected 1, 2 or 3");
    if (opt.budget > 0 && (opt.horizon < 2 || opt.paths == 0)) {
        throw ConfigError("probe", "horizon must be >= 2 and paths >= 1");
    }
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport r;
    r.scenario = "probe:conjecture-" + std::to_string(which);
    r.config = {{"conjecture", which},
                {"budget", opt.budget},
                {"horizon", opt.horizon},
                {"paths", opt.paths},
                {"seed", opt.seed},
                {"premise_tolerance", opt.premise_tolerance},
                {"candidate_threshold", opt.candidate_threshold}};
    const DivergenceKind kind = which == 2 ? DivergenceKind::KL : DivergenceKind::ABS;
    json instances = json::array();
    std::size_t candidates = 0;
    for (std::size_t i = 0; i < opt.budget; ++i) {
        detail::Draw d(opt.seed, i);
        detail::Instance inst{"", make_bernoulli(0.5), laplace(Alphabet::binary()), std::nullopt};
        if (which != 3 && i == 0) {
            auto t = nosumad_triple();
            inst = {"nosumad triple", t.mu, t.rho, t.chi};
        } else if (which == 1 && i == 1) {
            auto t = nosumavad_triple();
            inst = {"nosumavad triple", t.mu, t.rho, t.chi};
        } else if (which == 3) {
            const bool iid = i % 2 == 0;
            Measure nu = detail::random_source(d, iid);
            inst = {iid ? "i.i.d. source" : "stationary order-1 source", nu,
                    detail::random_mixture(d), std::nullopt};
        } else {
            Measure mu = detail::random_source(d, false);
            Measure rho = detail::random_predictor(d, mu);
            Measure chi = detail::random_contaminant(d, mu);
            inst = {"random triple", mu, rho, chi};
        }
        json e = {{"index", i},
                  {"label", inst.label},
                  {"mu", inst.mu.name()},
                  {"rho", inst.rho.name()}};
        if (inst.chi) e["chi"] = inst.chi->name();
        const std::size_t paths = opt.paths;
        const DivergenceKind ks[1] = {kind};
        const McResult base = monte_carlo_series(ks, inst.mu, inst.rho, opt.horizon, paths,
                                                 opt.seed + i);
        const McSeries& bs = base.series.front();
        double premise = 0.0;
        double conclusion = 0.0;
        std::string premise_stat;
        std::string conclusion_stat;
        std::optional<McResult> mixed;
        if (which == 3) {
            const bool iid = i % 2 == 0;
            premise_stat = "source class by construction";
            if (iid) {
                conclusion = detail::tail_max(bs.mean_step);
                conclusion_stat = "max over the second half of the horizon of mean a_t(nu, mixture)";
            } else {
                const DivergenceKind kl_only[1] = {DivergenceKind::KL};
                const McResult kl = monte_carlo_series(kl_only, inst.mu, inst.rho, opt.horizon,
                                                       paths, opt.seed + i);
                conclusion = kl.series.front().mean.back();
                conclusion_stat = "Monte Carlo dbar_N(nu, mixture)";
                mixed = kl;
            }
            e["premise"] = "APPLICABLE";
        } else {
            if (which == 1) {
                premise = detail::tail_max(bs.mean_step);
                premise_stat = "max over the second half of the horizon of mean a_t(mu, rho)";
            } else {
                premise = bs.mean.back();
                premise_stat = "Monte Carlo dbar_N(mu, rho)";
            }
            const bool applicable = std::isfinite(premise) && premise <= opt.premise_tolerance;
            e["premise_statistic"] = json_number(premise);
            e["premise"] = applicable ? "APPLICABLE" : "INAPPLICABLE";
            const Measure mix = contaminate(inst.rho, *inst.chi);
            mixed = monte_carlo_series(ks, inst.mu, mix, opt.horizon, paths, opt.seed + i);
            conclusion = mixed->series.front().mean.back();
            conclusion_stat = which == 1 ? "Monte Carlo abar_N(mu, (rho+chi)/2)"
                                         : "Monte Carlo dbar_N(mu, (rho+chi)/2)";
            if (!applicable) {
                e["conclusion_statistic"] = json_number(conclusion);
                e["candidate"] = false;
                instances.push_back(std::move(e));
                continue;
            }
        }
        e["premise_measure"] = premise_stat;
        e["conclusion_measure"] = conclusion_stat;
        e["conclusion_statistic"] = json_number(conclusion);
        const bool candidate = !(conclusion <= opt.candidate_threshold);
        e["candidate"] = candidate;
        if (candidate) {
            ++candidates;
            const std::string tag = "instance" + std::to_string(i);
            r.series.push_back(mc_table(tag + "_base", bs));
            if (mixed) r.series.push_back(mc_table(tag + "_conclusion", mixed->series.front()));
        }
        instances.push_back(std::move(e));
    }
    r.extra["instances"] = std::move(instances);
    r.extra["outcome"] = candidates == 0
                             ? "no counterexample found within budget"
                             : std::to_string(candidates) +
                                   " candidate instance(s) exhibited; see series";
    r.notes.push_back(
        "finite-horizon Monte Carlo statistics cannot confirm or refute a limit statement");
    r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace seqpred::harness
