#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "seqpred/measure.hpp"

namespace seqpred {

inline constexpr std::uint64_t kDefaultLeafBudget = std::uint64_t{1} << 24;

// Raised instead of silently truncating an exhaustive computation.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::string what, double required, std::uint64_t budget)
        : std::runtime_error(what + ": needs " + format(required) +
                             " leaf evaluations, budget is " + std::to_string(budget)),
          required_(required), budget_(budget) {}

    double required() const { return required_; }
    std::uint64_t budget() const { return budget_; }

private:
    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    double required_;
    std::uint64_t budget_;
};

// |X|^depth, as a double so that it cannot overflow
inline double leaf_count(std::size_t alphabet, std::size_t depth) {
    return std::pow(static_cast<double>(alphabet), static_cast<double>(depth));
}

inline void check_budget(const char* what, std::size_t alphabet, std::size_t depth,
                         std::uint64_t budget) {
    const double need = leaf_count(alphabet, depth);
    if (need > static_cast<double>(budget)) throw BudgetExceeded(what, need, budget);
}

namespace detail {

template <class Visit>
void walk_pair(const Tracker& mu, const Tracker& rho, History& x, std::size_t depth,
               bool prune_mu, Visit& visit) {
    visit(static_cast<const History&>(x), mu, rho);
    if (x.size() == depth) return;
    const auto q = mu.conditional().size();
    for (Symbol a = 0; a < q; ++a) {
        if (prune_mu && mu.conditional(a) == 0.0) continue;
        Tracker m2 = mu;
        Tracker r2 = rho;
        m2.advance(a);
        r2.advance(a);
        x.push_back(a);
        walk_pair(m2, r2, x, depth, prune_mu, visit);
        x.pop_back();
    }
}

}  // namespace detail

// Depth-first walk over every history of length 0..depth, carrying trackers
// for both measures. Subtrees with mu-probability zero are skipped when
// prune_mu is set. visit(history, mu_tracker, rho_tracker) sees every node.
template <class Visit>
void enumerate_pair(const Measure& mu, const Measure& rho, std::size_t depth, Visit&& visit,
                    std::uint64_t budget = kDefaultLeafBudget, bool prune_mu = true,
                    const History& prefix = {}) {
    if (!(mu.alphabet() == rho.alphabet())) {
        throw std::invalid_argument("enumerate_pair: alphabets differ");
    }
    check_budget("exact enumeration", mu.alphabet().size(), depth, budget);
    Tracker tm(mu);
    Tracker tr(rho);
    for (Symbol s : prefix) {
        tm.advance(s);
        tr.advance(s);
    }
    History x;
    detail::walk_pair(tm, tr, x, depth, prune_mu, visit);
}

// Neumaier-compensated running sum; deterministic for a fixed order of adds.
class CompensatedSum {
public:
    void add(double v) {
        if (std::isinf(v)) {
            inf_ = true;
            return;
        }
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            c_ += (sum_ - t) + v;
        } else {
            c_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const {
        return inf_ ? std::numeric_limits<double>::infinity() : sum_ + c_;
    }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
    bool inf_ = false;
};

}  // namespace seqpred
