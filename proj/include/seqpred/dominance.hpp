#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqpred/divergences.hpp"
#include "seqpred/enumerate.hpp"
#include "seqpred/measure.hpp"

namespace seqpred {

enum class DecayClass { BoundedBelow, SquareSummable, Subexponential, ExponentialOrWorse, Unknown };

inline std::string to_string(DecayClass c) {
    switch (c) {
        case DecayClass::BoundedBelow: return "BOUNDED_BELOW";
        case DecayClass::SquareSummable: return "SQUARE_SUMMABLE";
        case DecayClass::Subexponential: return "SUBEXPONENTIAL";
        case DecayClass::ExponentialOrWorse: return "EXPONENTIAL_OR_WORSE";
        case DecayClass::Unknown: return "UNKNOWN";
    }
    return "?";
}

enum class ProfileSource { ExactEnumeration, SampledPaths };

inline std::string to_string(ProfileSource s) {
    return s == ProfileSource::ExactEnumeration ? "exact enumeration" : "sampled paths";
}

// c_n = min over x_{1:n} with mu(x) > 0 of rho(x)/mu(x), stored as log c_n.
// Sampled profiles only bound c_n from above and are not certificates.
struct DominanceProfile {
    std::vector<double> log_c;     // index i holds n = first_n + i
    std::vector<History> witness;  // argmin string per n (exact profiles)
    ProfileSource source = ProfileSource::ExactEnumeration;
    DecayClass decay_class = DecayClass::Unknown;
    std::size_t first_n = 1;

    std::size_t size() const { return log_c.size(); }
    std::size_t last_n() const { return first_n + log_c.size() - 1; }
    double c(std::size_t n) const { return std::exp(log_c.at(n - first_n)); }
    double log_c_at(std::size_t n) const { return log_c.at(n - first_n); }

    static DominanceProfile from_values(std::vector<double> c, std::size_t first_n = 1) {
        DominanceProfile p;
        p.first_n = first_n;
        for (double v : c) {
            if (!(v > 0.0)) throw std::invalid_argument("DominanceProfile: c_n must be > 0");
            p.log_c.push_back(std::log(v));
        }
        return p;
    }
};

// rho gives probability zero to a string that mu can produce.
class NotDominating : public std::runtime_error {
public:
    explicit NotDominating(History witness)
        : std::runtime_error("NOT_DOMINATING: rho assigns 0 to mu-positive string '" +
                             to_string(witness) + "'"),
          witness_(std::move(witness)) {}
    const History& witness() const { return witness_; }

private:
    History witness_;
};

inline DominanceProfile dominance_profile_exact(const Measure& rho, const Measure& mu,
                                                std::size_t n_max,
                                                std::uint64_t budget = kDefaultLeafBudget) {
    DominanceProfile p;
    p.source = ProfileSource::ExactEnumeration;
    p.log_c.assign(n_max, kInf);
    p.witness.assign(n_max, {});
    enumerate_pair(
        mu, rho, n_max,
        [&](const History& x, const Tracker& m, const Tracker& r) {
            if (x.empty() || m.log_marginal().is_zero()) return;
            if (r.log_marginal().is_zero()) throw NotDominating(x);
            const double lr = r.log_marginal().value() - m.log_marginal().value();
            auto& best = p.log_c[x.size() - 1];
            if (lr < best) {
                best = lr;
                p.witness[x.size() - 1] = x;
            }
        },
        budget);
    return p;
}

// Path-wise minima of rho/mu over sampled mu-paths: an upper bound on c_n.
inline DominanceProfile dominance_profile_sampled(const Measure& rho, const Measure& mu,
                                                  std::size_t n_max, std::size_t paths,
                                                  std::uint64_t seed) {
    DominanceProfile p;
    p.source = ProfileSource::SampledPaths;
    p.log_c.assign(n_max, kInf);
    p.witness.assign(n_max, {});
    for (std::size_t i = 0; i < paths; ++i) {
        const History x = sample_path(mu, seed, n_max, i);
        Tracker tm(mu), tr(rho);
        for (std::size_t t = 0; t < n_max; ++t) {
            tm.advance(x[t]);
            tr.advance(x[t]);
            if (tr.log_marginal().is_zero()) {
                throw NotDominating(History(x.begin(), x.begin() + static_cast<long>(t + 1)));
            }
            const double lr = tr.log_marginal().value() - tm.log_marginal().value();
            if (lr < p.log_c[t]) {
                p.log_c[t] = lr;
                p.witness[t].assign(x.begin(), x.begin() + static_cast<long>(t + 1));
            }
        }
    }
    return p;
}

// n! / (n + |X| - 1)!: the Laplace measure dominates every i.i.d. measure
// with these coefficients; on a binary alphabet equality holds at a deterministic source.
inline double log_laplace_bound(std::size_t n, std::size_t alphabet_size) {
    if (alphabet_size < 1) throw std::invalid_argument("log_laplace_bound: empty alphabet");
    const double nn = static_cast<double>(n);
    return std::lgamma(nn + 1.0) - std::lgamma(nn + static_cast<double>(alphabet_size));
}

inline double laplace_bound(std::size_t n, std::size_t alphabet_size) {
    return std::exp(log_laplace_bound(n, alphabet_size));
}

struct DecayFit {
    DecayClass decay_class = DecayClass::Unknown;
    // increments of log c_n^-1 over the last three doublings of n
    double increment_last = 0.0;     // L(N) - L(N/2)
    double increment_prev = 0.0;     // L(N/2) - L(N/4)
    double increment_early = 0.0;    // L(N/4) - L(N/8), NaN if out of range
    double growth_exponent = 0.0;    // log2(increment_last / increment_prev)
    double growth_exponent_prev = 0.0;
    std::string note;
};

struct DecayOptions {
    double plateau_tolerance = 0.05;  // max |L(N) - L(N/2)| for a plateau
    double square_summable_below = 0.5;
    double exponential_from = 0.85;
    double max_exponent_drift = 0.5;
};

// Heuristic: for L_n = log c_n^-1 ~ C n^alpha + const the increment over a
// doubling of n grows by 2^alpha. Only differences of L enter, so scaling
// all c_n by a constant never changes the class.
inline DecayFit classify_decay(const DominanceProfile& p, const DecayOptions& opt = {}) {
    if (p.size() < 16) throw std::invalid_argument("classify_decay: profile shorter than 16");
    const std::size_t N = p.last_n();
    auto L = [&](std::size_t n) { return -p.log_c_at(std::max(n, p.first_n)); };
    DecayFit f;
    f.increment_last = L(N) - L(N / 2);
    f.increment_prev = L(N / 2) - L(N / 4);
    f.increment_early = (N / 8 >= p.first_n) ? L(N / 4) - L(N / 8) : std::nan("");

    for (double v : p.log_c) {
        if (!std::isfinite(v)) {
            f.note = "non-finite coefficient";
            return f;
        }
    }
    if (std::abs(f.increment_last) <= opt.plateau_tolerance) {
        f.decay_class = DecayClass::BoundedBelow;
        f.note = "log c_n^-1 flat over the last doubling";
        return f;
    }
    if (f.increment_last < 0.0 || f.increment_prev <= 0.0) {
        f.note = "log c_n^-1 not increasing; no growth law fits";
        return f;
    }
    f.growth_exponent = std::log2(f.increment_last / f.increment_prev);
    if (std::isfinite(f.increment_early) && f.increment_early > 0.0) {
        f.growth_exponent_prev = std::log2(f.increment_prev / f.increment_early);
        if (std::abs(f.growth_exponent - f.growth_exponent_prev) > opt.max_exponent_drift) {
            f.note = "growth exponent unstable across doublings";
            return f;
        }
    } else {
        f.growth_exponent_prev = std::nan("");
    }
    if (f.growth_exponent >= opt.exponential_from) {
        f.decay_class = DecayClass::ExponentialOrWorse;
    } else if (f.growth_exponent < opt.square_summable_below) {
        f.decay_class = DecayClass::SquareSummable;
    } else {
        f.decay_class = DecayClass::Subexponential;
    }
    return f;
}

}  // namespace seqpred
