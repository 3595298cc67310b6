#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <span>
#include <stdexcept>

namespace seqpred {

// Probability held as its natural logarithm. Probability zero is the
// distinguished value -infinity, which absorbs under multiplication.
class LogProb {
public:
    static constexpr double neg_inf = -std::numeric_limits<double>::infinity();

    constexpr LogProb() = default;  // log 1

    static LogProb from_log(double v) {
        if (std::isnan(v) || v > 1e-9) {
            throw std::domain_error("LogProb: log-value must be <= 0");
        }
        return LogProb(std::min(v, 0.0));
    }

    static LogProb from_prob(double p) {
        if (!(p >= 0.0) || p > 1.0 + 1e-12) {
            throw std::domain_error("LogProb: probability outside [0,1]");
        }
        return p == 0.0 ? zero() : LogProb(std::min(std::log(p), 0.0));
    }

    static constexpr LogProb zero() { return LogProb(neg_inf); }
    static constexpr LogProb one() { return LogProb(0.0); }

    constexpr double value() const { return value_; }
    constexpr bool is_zero() const { return value_ == neg_inf; }
    double prob() const { return is_zero() ? 0.0 : std::exp(value_); }

    // product of probabilities
    friend constexpr LogProb operator*(LogProb a, LogProb b) {
        if (a.is_zero() || b.is_zero()) return zero();
        return LogProb(a.value_ + b.value_);
    }
    LogProb& operator*=(LogProb o) { return *this = *this * o; }

    friend constexpr auto operator<=>(LogProb, LogProb) = default;

private:
    constexpr explicit LogProb(double v) : value_(v) {}
    double value_ = 0.0;
};

// log(sum_i exp(v_i)); all -inf gives -inf.
inline double log_sum_exp(std::span<const double> v) {
    double top = LogProb::neg_inf;
    for (double x : v) top = std::max(top, x);
    if (top == LogProb::neg_inf) return top;
    double s = 0.0;
    for (double x : v) {
        if (x != LogProb::neg_inf) s += std::exp(x - top);
    }
    return top + std::log(s);
}

inline double log_sum_exp(double a, double b) {
    const double v[2] = {a, b};
    return log_sum_exp(std::span<const double>(v, 2));
}

}  // namespace seqpred
