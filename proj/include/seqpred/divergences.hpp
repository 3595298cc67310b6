#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqpred/enumerate.hpp"
#include "seqpred/measure.hpp"

namespace seqpred {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class DivergenceKind { KL, ABS, SQ, HELLINGER };

inline constexpr std::array<DivergenceKind, 4> kAllKinds = {
    DivergenceKind::KL, DivergenceKind::ABS, DivergenceKind::SQ, DivergenceKind::HELLINGER};

inline std::string to_string(DivergenceKind k) {
    switch (k) {
        case DivergenceKind::KL: return "KL";
        case DivergenceKind::ABS: return "ABS";
        case DivergenceKind::SQ: return "SQ";
        case DivergenceKind::HELLINGER: return "HELLINGER";
    }
    return "?";
}

inline DivergenceKind parse_kind(const std::string& s) {
    for (auto k : kAllKinds) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown divergence kind '" + s + "'");
}

// One-step divergence between next-symbol distributions (natural log for KL).
//   KL         sum mu log(mu/rho), 0 log 0 = 0, +inf if rho = 0 < mu somewhere
//   ABS        sum |mu - rho|
//   SQ         sum (mu - rho)^2
//   HELLINGER  sum (sqrt mu - sqrt rho)^2
inline double step_divergence(DivergenceKind kind, std::span<const double> mu,
                              std::span<const double> rho) {
    if (mu.size() != rho.size()) {
        throw std::invalid_argument("step_divergence: alphabet sizes differ (" +
                                    std::to_string(mu.size()) + " vs " +
                                    std::to_string(rho.size()) + ")");
    }
    double s = 0.0;
    switch (kind) {
        case DivergenceKind::KL:
            for (std::size_t i = 0; i < mu.size(); ++i) {
                if (mu[i] <= 0.0) continue;
                if (rho[i] <= 0.0) return kInf;
                s += mu[i] * std::log(mu[i] / rho[i]);
            }
            return std::max(s, 0.0);
        case DivergenceKind::ABS:
            for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - rho[i]);
            return s;
        case DivergenceKind::SQ:
            for (std::size_t i = 0; i < mu.size(); ++i) s += (mu[i] - rho[i]) * (mu[i] - rho[i]);
            return s;
        case DivergenceKind::HELLINGER:
            for (std::size_t i = 0; i < mu.size(); ++i) {
                const double d = std::sqrt(mu[i]) - std::sqrt(rho[i]);
                s += d * d;
            }
            return s;
    }
    return s;
}

inline double step_divergence(DivergenceKind kind, const ConditionalDist& mu,
                              const ConditionalDist& rho) {
    return step_divergence(kind, mu.probs(), rho.probs());
}

// Per-step divergence along one history and its running (Cesaro) average.
// Index t-1 holds step t.
struct DivergenceSeries {
    DivergenceKind kind = DivergenceKind::KL;
    std::vector<double> per_step;
    std::vector<double> running_average;
    std::size_t infinite_steps = 0;

    std::size_t horizon() const { return per_step.size(); }
    double final_average() const {
        return running_average.empty() ? 0.0 : running_average.back();
    }
};

namespace detail {

inline void fill_running_average(DivergenceSeries& s) {
    s.running_average.resize(s.per_step.size());
    CompensatedSum acc;
    for (std::size_t t = 0; t < s.per_step.size(); ++t) {
        acc.add(s.per_step[t]);
        if (std::isinf(s.per_step[t])) ++s.infinite_steps;
        s.running_average[t] = acc.value() / static_cast<double>(t + 1);
    }
}

}  // namespace detail

// Series for several kinds in a single pass over x.
inline std::vector<DivergenceSeries> path_series(std::span<const DivergenceKind> kinds,
                                                 const Measure& mu, const Measure& rho,
                                                 std::span<const Symbol> x) {
    if (!(mu.alphabet() == rho.alphabet())) {
        throw std::invalid_argument("path_series: alphabets differ");
    }
    validate_history(mu.alphabet(), x);
    std::vector<DivergenceSeries> out(kinds.size());
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        out[k].kind = kinds[k];
        out[k].per_step.reserve(x.size());
    }
    Tracker tm(mu);
    Tracker tr(rho);
    for (Symbol s : x) {
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            out[k].per_step.push_back(step_divergence(kinds[k], tm.conditional(), tr.conditional()));
        }
        tm.advance(s);
        tr.advance(s);
    }
    for (auto& s : out) detail::fill_running_average(s);
    return out;
}

inline DivergenceSeries path_series(DivergenceKind kind, const Measure& mu, const Measure& rho,
                                    std::span<const Symbol> x) {
    const DivergenceKind k[1] = {kind};
    return std::move(path_series(std::span<const DivergenceKind>(k, 1), mu, rho, x).front());
}

// E_mu d_t for t = 1..n_max by exact enumeration: per-step divergences
// weighted by mu(x_{<t}). Entry t-1 holds step t.
inline std::vector<double> expected_step_exact_series(DivergenceKind kind, const Measure& mu,
                                                      const Measure& rho, std::size_t n_max,
                                                      std::uint64_t budget = kDefaultLeafBudget) {
    check_budget("expected_step_exact", mu.alphabet().size(), n_max, budget);
    if (n_max == 0) return {};
    std::vector<CompensatedSum> by_step(n_max);
    enumerate_pair(
        mu, rho, n_max - 1,
        [&](const History& x, const Tracker& m, const Tracker& r) {
            const double w = m.log_marginal().prob();
            if (w == 0.0) return;
            const double d = step_divergence(kind, m.conditional(), r.conditional());
            by_step[x.size()].add(std::isinf(d) ? d : w * d);
        },
        budget);
    std::vector<double> out(n_max);
    for (std::size_t t = 0; t < n_max; ++t) out[t] = by_step[t].value();
    return out;
}

inline std::vector<double> running_averages(const std::vector<double>& per_step) {
    std::vector<double> out(per_step.size());
    CompensatedSum cum;
    for (std::size_t t = 0; t < per_step.size(); ++t) {
        cum.add(per_step[t]);
        out[t] = cum.value() / static_cast<double>(t + 1);
    }
    return out;
}

// E_mu dbar_n for n = 1..n_max. Entry n-1 holds horizon n.
inline std::vector<double> expected_average_exact_series(DivergenceKind kind, const Measure& mu,
                                                         const Measure& rho, std::size_t n_max,
                                                         std::uint64_t budget = kDefaultLeafBudget) {
    return running_averages(expected_step_exact_series(kind, mu, rho, n_max, budget));
}

inline double expected_average_exact(DivergenceKind kind, const Measure& mu, const Measure& rho,
                                     std::size_t n, std::uint64_t budget = kDefaultLeafBudget) {
    if (n == 0) throw std::invalid_argument("expected_average_exact: horizon must be >= 1");
    return expected_average_exact_series(kind, mu, rho, n, budget).back();
}

// (1/n) E_mu log(mu(x_{1:n}) / rho(x_{1:n})) for n = 1..n_max, summed over
// whole strings. Must agree with the KL series above.
inline std::vector<double> expected_log_ratio_series(const Measure& mu, const Measure& rho,
                                                     std::size_t n_max,
                                                     std::uint64_t budget = kDefaultLeafBudget) {
    std::vector<CompensatedSum> by_len(n_max + 1);
    enumerate_pair(
        mu, rho, n_max,
        [&](const History& x, const Tracker& m, const Tracker& r) {
            if (x.empty()) return;
            const LogProb lm = m.log_marginal();
            if (lm.is_zero()) return;
            const LogProb lr = r.log_marginal();
            if (lr.is_zero()) {
                by_len[x.size()].add(kInf);
                return;
            }
            by_len[x.size()].add(lm.prob() * (lm.value() - lr.value()));
        },
        budget);
    std::vector<double> out(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
        out[n - 1] = by_len[n].value() / static_cast<double>(n);
    }
    return out;
}

// Monte Carlo summary of dbar_n over independent mu-paths.
struct McSeries {
    DivergenceKind kind = DivergenceKind::KL;
    std::vector<double> mean;          // E dbar_n estimate, index n-1
    std::vector<double> std_error;       // standard error of the mean
    std::vector<double> min;
    std::vector<double> max;
    std::vector<double> mean_step;     // E d_n estimate
    std::vector<std::size_t> infinite_paths;  // paths with dbar_n = +inf
};

struct McResult {
    std::size_t paths = 0;
    std::size_t horizon = 0;
    std::uint64_t seed = 0;
    std::size_t rho_zero_paths = 0;  // paths on which rho(x_{1:N}) = 0
    std::vector<McSeries> series;    // one per requested kind
};

namespace detail {

// Welford accumulator that tolerates +inf samples by counting them.
struct Moments {
    std::size_t n = 0;
    std::size_t inf = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double lo = kInf;
    double hi = -kInf;

    void add(double v) {
        ++n;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        if (std::isinf(v)) {
            ++inf;
            return;
        }
        const std::size_t k = n - inf;
        const double d = v - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (v - mean);
    }
    double estimate() const { return inf ? kInf : mean; }
    double std_error() const {
        if (inf) return kInf;
        if (n < 2) return 0.0;
        return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    }
};

}  // namespace detail

// Paths are drawn with sample_path(mu, seed, n, stream = path index), so
// each path can be regenerated on its own.
inline McResult monte_carlo_series(std::span<const DivergenceKind> kinds, const Measure& mu,
                                   const Measure& rho, std::size_t n, std::size_t paths,
                                   std::uint64_t seed) {
    if (!(mu.alphabet() == rho.alphabet())) {
        throw std::invalid_argument("monte_carlo_series: alphabets differ");
    }
    McResult res;
    res.paths = paths;
    res.horizon = n;
    res.seed = seed;
    const std::size_t nk = kinds.size();
    std::vector<std::vector<detail::Moments>> avg(nk, std::vector<detail::Moments>(n));
    std::vector<std::vector<detail::Moments>> step(nk, std::vector<detail::Moments>(n));
    const CounterRng rng(seed);
    std::vector<CompensatedSum> acc(nk);
    for (std::size_t p = 0; p < paths; ++p) {
        Tracker tm(mu);
        Tracker tr(rho);
        std::fill(acc.begin(), acc.end(), CompensatedSum{});
        for (std::size_t t = 0; t < n; ++t) {
            for (std::size_t k = 0; k < nk; ++k) {
                const double d = step_divergence(kinds[k], tm.conditional(), tr.conditional());
                acc[k].add(d);
                step[k][t].add(d);
                avg[k][t].add(acc[k].value() / static_cast<double>(t + 1));
            }
            const Symbol s = draw_symbol(tm.conditional(), rng.uniform(p, t));
            tm.advance(s);
            tr.advance(s);
        }
        if (tr.log_marginal().is_zero()) ++res.rho_zero_paths;
    }
    for (std::size_t k = 0; k < nk; ++k) {
        McSeries s;
        s.kind = kinds[k];
        for (std::size_t t = 0; t < n; ++t) {
            s.mean.push_back(avg[k][t].estimate());
            s.std_error.push_back(avg[k][t].std_error());
            s.min.push_back(avg[k][t].lo);
            s.max.push_back(avg[k][t].hi);
            s.mean_step.push_back(step[k][t].estimate());
            s.infinite_paths.push_back(avg[k][t].inf);
        }
        res.series.push_back(std::move(s));
    }
    return res;
}

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t infinite_paths = 0;
};

// Sample mean and standard error of dbar_n over `paths` mu-paths.
inline McEstimate expected_average_mc(DivergenceKind kind, const Measure& mu, const Measure& rho,
                                      std::size_t n, std::size_t paths, std::uint64_t seed) {
    if (paths < 2) throw std::invalid_argument("expected_average_mc: need at least 2 paths");
    if (n == 0) throw std::invalid_argument("expected_average_mc: horizon must be >= 1");
    const DivergenceKind k[1] = {kind};
    const auto r = monte_carlo_series(std::span<const DivergenceKind>(k, 1), mu, rho, n, paths, seed);
    const auto& s = r.series.front();
    return {s.mean.back(), s.std_error.back(), s.infinite_paths.back()};
}

// Lower bound on the total-variation distance between the futures of mu and
// rho after x: the largest |mu(A|x) - rho(A|x)| over events A decided by the
// next `depth` symbols, i.e. half the L1 distance of the depth-step laws.
inline double tv_finite_horizon(const Measure& mu, const Measure& rho, std::span<const Symbol> x,
                                std::size_t depth, std::uint64_t budget = kDefaultLeafBudget) {
    validate_history(mu.alphabet(), x);
    CompensatedSum l1;
    History prefix(x.begin(), x.end());
    // walk all continuations (no pruning: rho may live where mu does not);
    // conditional probabilities are products of next-symbol conditionals
    struct Node {
        Tracker m, r;
        double pm, pr;
    };
    check_budget("tv_finite_horizon", mu.alphabet().size(), depth, budget);
    Tracker tm(mu), tr(rho);
    for (Symbol s : prefix) {
        tm.advance(s);
        tr.advance(s);
    }
    const std::size_t q = mu.alphabet().size();
    std::vector<Node> frontier{{tm, tr, 1.0, 1.0}};
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<Node> next;
        next.reserve(frontier.size() * q);
        for (const auto& nd : frontier) {
            for (Symbol a = 0; a < q; ++a) {
                const double pm = nd.pm * nd.m.conditional(a);
                const double pr = nd.pr * nd.r.conditional(a);
                if (pm == 0.0 && pr == 0.0) continue;
                Node c{nd.m, nd.r, pm, pr};
                if (d + 1 < depth) {
                    c.m.advance(a);
                    c.r.advance(a);
                }
                next.push_back(std::move(c));
            }
        }
        frontier = std::move(next);
    }
    for (const auto& nd : frontier) l1.add(std::abs(nd.pm - nd.pr));
    return 0.5 * l1.value();
}

// Pinsker / Jensen audit: a_t^2 <= 2 d_t per step and abar_n^2 <= 2 dbar_n
// per horizon.
struct PinskerViolation {
    std::size_t step = 0;  // 1-based
    bool averaged = false;
    double a = 0.0;
    double d = 0.0;
};

struct PinskerVerdict {
    bool ok = true;
    std::size_t checked = 0;
    double min_slack = kInf;  // min of 2d - a^2 over all checks
    std::optional<PinskerViolation> first_violation;
};

inline constexpr double kPinskerTolerance = 1e-12;

inline bool pinsker_holds(double a, double d, double tol = kPinskerTolerance) {
    return a * a <= 2.0 * d + tol * (1.0 + 2.0 * std::abs(d));
}

inline PinskerVerdict pinsker_audit(const DivergenceSeries& kl, const DivergenceSeries& abs) {
    if (kl.kind != DivergenceKind::KL || abs.kind != DivergenceKind::ABS) {
        throw std::invalid_argument("pinsker_audit: expects a KL and an ABS series");
    }
    if (kl.horizon() != abs.horizon()) {
        throw std::invalid_argument("pinsker_audit: series lengths differ");
    }
    PinskerVerdict v;
    auto check = [&](std::size_t t, bool averaged, double a, double d) {
        ++v.checked;
        if (!std::isinf(d)) v.min_slack = std::min(v.min_slack, 2.0 * d - a * a);
        if (!pinsker_holds(a, d) && v.ok) {
            v.ok = false;
            v.first_violation = PinskerViolation{t + 1, averaged, a, d};
        }
    };
    for (std::size_t t = 0; t < kl.horizon(); ++t) {
        check(t, false, abs.per_step[t], kl.per_step[t]);
        check(t, true, abs.running_average[t], kl.running_average[t]);
    }
    return v;
}

}  // namespace seqpred
