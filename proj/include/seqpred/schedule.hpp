#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqpred {

// A strictly increasing set of (1-based) time steps n_1 < n_2 < ...,
// either given by a closed-form rule or an explicit finite list.
//
//   Pow2       n_k = 2^k,      k >= 1   (2, 4, 8, ...)
//   DoubleExp  n_k = 2^(2^k),  k >= 1   (4, 16, 256, 65536, 2^32)
//   Cubic      n_k = k^3,      k >= 2   (8, 27, 64, ...)
//   Custom     explicit list, first step >= 2
class StepSchedule {
public:
    enum class Rule { Pow2, DoubleExp, Cubic, Custom };

    static StepSchedule pow2() { return StepSchedule(Rule::Pow2, {}); }
    static StepSchedule double_exp() { return StepSchedule(Rule::DoubleExp, {}); }
    static StepSchedule cubic() { return StepSchedule(Rule::Cubic, {}); }
    static StepSchedule custom(std::vector<std::uint64_t> steps) {
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (steps[i] < 2) {
                throw std::invalid_argument("StepSchedule: steps must be >= 2");
            }
            if (i > 0 && steps[i] <= steps[i - 1]) {
                throw std::invalid_argument(
                    "StepSchedule: steps must be strictly increasing (duplicate or "
                    "overlapping step " + std::to_string(steps[i]) + ")");
            }
        }
        return StepSchedule(Rule::Custom, std::move(steps));
    }
    static StepSchedule empty() { return custom({}); }

    Rule rule() const { return rule_; }

    // n_k, or nullopt if it does not exist or does not fit in 64 bits.
    std::optional<std::uint64_t> step(std::size_t k) const {
        switch (rule_) {
            case Rule::Pow2:
                if (k < 1 || k > 63) return std::nullopt;
                return std::uint64_t{1} << k;
            case Rule::DoubleExp:
                if (k < 1 || k > 5) return std::nullopt;
                return std::uint64_t{1} << (std::uint64_t{1} << k);
            case Rule::Cubic: {
                if (k < 2 || k > 2642245) return std::nullopt;
                const std::uint64_t kk = k;
                return kk * kk * kk;
            }
            case Rule::Custom:
                if (k < 1 || k > custom_.size()) return std::nullopt;
                return custom_[k - 1];
        }
        return std::nullopt;
    }

    std::size_t first_index() const { return rule_ == Rule::Cubic ? 2 : 1; }

    // k with n_k == n, if n is scheduled.
    std::optional<std::size_t> index_of(std::uint64_t n) const {
        if (rule_ == Rule::Custom) {
            auto it = std::lower_bound(custom_.begin(), custom_.end(), n);
            if (it == custom_.end() || *it != n) return std::nullopt;
            return static_cast<std::size_t>(it - custom_.begin()) + 1;
        }
        for (std::size_t k = first_index();; ++k) {
            auto s = step(k);
            if (!s || *s > n) return std::nullopt;
            if (*s == n) return k;
            if (rule_ == Rule::Cubic && n > 8) {
                // jump close to the cube root instead of scanning
                auto r = static_cast<std::size_t>(std::cbrt(static_cast<double>(n)));
                if (r > k + 2) k = r - 2;
            }
        }
    }

    bool contains(std::uint64_t n) const { return index_of(n).has_value(); }

    // |{k : n_k <= n}|
    std::size_t count_up_to(std::uint64_t n) const {
        std::size_t c = 0;
        for (std::size_t k = first_index();; ++k) {
            auto s = step(k);
            if (!s || *s > n) return c;
            ++c;
        }
    }

    std::vector<std::uint64_t> materialize(std::uint64_t horizon) const {
        std::vector<std::uint64_t> out;
        for (std::size_t k = first_index();; ++k) {
            auto s = step(k);
            if (!s || *s > horizon) return out;
            out.push_back(*s);
        }
    }

    std::string name() const {
        switch (rule_) {
            case Rule::Pow2: return "POW2";
            case Rule::DoubleExp: return "DOUBLE_EXP";
            case Rule::Cubic: return "CUBIC";
            case Rule::Custom: return "CUSTOM";
        }
        return "?";
    }

    static StepSchedule from_name(const std::string& name) {
        if (name == "POW2") return pow2();
        if (name == "DOUBLE_EXP") return double_exp();
        if (name == "CUBIC") return cubic();
        throw std::invalid_argument("unknown schedule rule '" + name + "'");
    }

private:
    StepSchedule(Rule r, std::vector<std::uint64_t> c) : rule_(r), custom_(std::move(c)) {}

    Rule rule_;
    std::vector<std::uint64_t> custom_;
};

}  // namespace seqpred
