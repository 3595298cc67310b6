#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqpred {

using Symbol = std::uint32_t;

// Finite alphabet {0, ..., size-1}.
class Alphabet {
public:
    explicit Alphabet(std::size_t size) : size_(size) {
        if (size < 2) throw std::invalid_argument("Alphabet: size must be >= 2");
    }

    static Alphabet binary() { return Alphabet(2); }

    std::size_t size() const { return size_; }
    bool contains(Symbol s) const { return s < size_; }

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    std::size_t size_;
};

// x_{1:n}; element t-1 is the symbol drawn at step t.
using History = std::vector<Symbol>;

inline void validate_history(const Alphabet& a, std::span<const Symbol> x) {
    for (Symbol s : x) {
        if (!a.contains(s)) {
            throw std::invalid_argument("history symbol " + std::to_string(s) +
                                        " outside alphabet of size " +
                                        std::to_string(a.size()));
        }
    }
}

inline std::string to_string(std::span<const Symbol> x) {
    std::string out;
    out.reserve(x.size());
    for (Symbol s : x) {
        if (s < 10) {
            out.push_back(static_cast<char>('0' + s));
        } else {
            out += "<" + std::to_string(s) + ">";
        }
    }
    return out;
}

inline constexpr double kNormTolerance = 1e-12;

// Next-symbol probability vector.
class ConditionalDist {
public:
    ConditionalDist() = default;

    explicit ConditionalDist(std::vector<double> probs) : probs_(std::move(probs)) {
        validate();
    }
    ConditionalDist(std::initializer_list<double> probs) : probs_(probs) { validate(); }

    static ConditionalDist uniform(std::size_t n) {
        return ConditionalDist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    // all mass on one symbol
    static ConditionalDist point(std::size_t n, Symbol s) {
        std::vector<double> p(n, 0.0);
        p.at(s) = 1.0;
        return ConditionalDist(std::move(p));
    }

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const { return probs_; }

    friend bool operator==(const ConditionalDist&, const ConditionalDist&) = default;

private:
    void validate() const {
        if (probs_.size() < 2) {
            throw std::invalid_argument("ConditionalDist: need at least two entries");
        }
        double sum = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw std::invalid_argument("ConditionalDist: entry outside [0,1]");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kNormTolerance) {
            throw std::invalid_argument("ConditionalDist: entries sum to " +
                                        std::to_string(sum) + ", not 1");
        }
    }

    std::vector<double> probs_;
};

}  // namespace seqpred
