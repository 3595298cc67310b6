#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqpred/measure.hpp"

namespace seqpred {

// Positive weights, normalized to sum to one.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> w) : w_(std::move(w)) {
        if (w_.empty()) throw std::invalid_argument("WeightVector: empty");
        double sum = 0.0;
        for (double v : w_) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument("WeightVector: weights must be positive and finite");
            }
            sum += v;
        }
        for (double& v : w_) v /= sum;
    }

    // w_k proportional to 2^-(k+1), k = 0..n-1
    static WeightVector geometric(std::size_t n) {
        std::vector<double> w(n);
        for (std::size_t k = 0; k < n; ++k) w[k] = std::ldexp(1.0, -static_cast<int>(k + 1));
        return WeightVector(std::move(w));
    }

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    const std::vector<double>& values() const { return w_; }

private:
    std::vector<double> w_;
};

struct MixtureComponent {
    Measure measure;
    double weight;
};

namespace detail {

// Per-context Laplace counts. Order 0 is the plain Laplace rule.
class MarkovLaplaceModel final : public MeasureModel {
public:
    MarkovLaplaceModel(std::size_t alphabet, std::size_t order) : q_(alphabet), k_(order) {
        contexts_ = 1;
        for (std::size_t i = 0; i < k_; ++i) contexts_ *= q_;
    }

    class State final : public MeasureState {
    public:
        explicit State(const MarkovLaplaceModel& m)
            : m_(&m), counts_(m.contexts_ * m.q_, 0), totals_(m.contexts_, 0), symbols_(m.q_, 0) {}

        void next(std::span<double> out) const override {
            const double q = static_cast<double>(m_->q_);
            if (len_ < m_->k_) {
                // not enough history for a full context yet: order-0 rule
                const double n = static_cast<double>(len_);
                for (std::size_t a = 0; a < m_->q_; ++a) {
                    out[a] = (static_cast<double>(symbols_[a]) + 1.0) / (n + q);
                }
                return;
            }
            const double n = static_cast<double>(totals_[ctx_]);
            const std::uint32_t* row = &counts_[ctx_ * m_->q_];
            for (std::size_t a = 0; a < m_->q_; ++a) {
                out[a] = (static_cast<double>(row[a]) + 1.0) / (n + q);
            }
        }

        void advance(Symbol s) override {
            if (len_ >= m_->k_) {
                ++counts_[ctx_ * m_->q_ + s];
                ++totals_[ctx_];
            }
            ++symbols_[s];
            ctx_ = m_->contexts_ == 1 ? 0 : (ctx_ * m_->q_ + s) % m_->contexts_;
            ++len_;
        }

        std::unique_ptr<MeasureState> clone() const override {
            return std::make_unique<State>(*this);
        }

    private:
        const MarkovLaplaceModel* m_;
        std::vector<std::uint32_t> counts_;
        std::vector<std::uint32_t> totals_;
        std::vector<std::uint32_t> symbols_;
        std::size_t ctx_ = 0;
        std::size_t len_ = 0;
    };

    std::unique_ptr<MeasureState> start() const override { return std::make_unique<State>(*this); }

private:
    std::size_t q_;
    std::size_t k_;
    std::size_t contexts_;
};

class MixtureModel final : public MeasureModel {
public:
    MixtureModel(std::vector<Measure> components, std::vector<double> weights)
        : components_(std::move(components)) {
        log_w_.reserve(weights.size());
        for (double w : weights) log_w_.push_back(std::log(w));
    }

    class State final : public MeasureState {
    public:
        explicit State(const MixtureModel& m) : m_(&m) {
            trackers_.reserve(m.components_.size());
            for (const auto& c : m.components_) trackers_.emplace_back(c);
            log_joint_.resize(trackers_.size());
            posterior_.resize(trackers_.size());
            update_posterior();
        }

        // xi(a | x) = xi(x a) / xi(x) = sum_i post_i(x) nu_i(a | x)
        // with post_i(x) = w_i nu_i(x) / xi(x) formed in log domain.
        void next(std::span<double> out) const override {
            std::fill(out.begin(), out.end(), 0.0);
            if (dead_) {
                // xi(x) = 0: history unreachable; any normalized answer will do
                const double u = 1.0 / static_cast<double>(out.size());
                std::fill(out.begin(), out.end(), u);
                return;
            }
            for (std::size_t i = 0; i < trackers_.size(); ++i) {
                if (posterior_[i] == 0.0) continue;
                auto c = trackers_[i].conditional();
                for (std::size_t a = 0; a < out.size(); ++a) out[a] += posterior_[i] * c[a];
            }
        }

        void advance(Symbol s) override {
            for (auto& t : trackers_) t.advance(s);
            update_posterior();
        }

        std::unique_ptr<MeasureState> clone() const override {
            return std::make_unique<State>(*this);
        }

    private:
        void update_posterior() {
            for (std::size_t i = 0; i < trackers_.size(); ++i) {
                log_joint_[i] = m_->log_w_[i] + trackers_[i].log_marginal().value();
            }
            const double z = log_sum_exp(log_joint_);
            dead_ = (z == LogProb::neg_inf);
            for (std::size_t i = 0; i < trackers_.size(); ++i) {
                posterior_[i] = dead_ || log_joint_[i] == LogProb::neg_inf
                                    ? 0.0
                                    : std::exp(log_joint_[i] - z);
            }
        }

        const MixtureModel* m_;
        std::vector<Tracker> trackers_;
        std::vector<double> log_joint_;
        std::vector<double> posterior_;
        bool dead_ = false;
    };

    std::unique_ptr<MeasureState> start() const override { return std::make_unique<State>(*this); }

private:
    std::vector<Measure> components_;
    std::vector<double> log_w_;
};

}  // namespace detail

// rho_L(x_{n+1} = a | x_{1:n}) = (k_a + 1) / (n + |X|)
inline Measure laplace(const Alphabet& alphabet) {
    return Measure(alphabet, std::make_shared<detail::MarkovLaplaceModel>(alphabet.size(), 0),
                   "laplace");
}

// Laplace rule applied separately within each length-k context; the first k
// steps use the order-0 rule on all symbols seen so far.
inline Measure markov_laplace(const Alphabet& alphabet, std::size_t order) {
    std::size_t contexts = 1;
    for (std::size_t i = 0; i < order; ++i) {
        contexts *= alphabet.size();
        if (contexts > (std::size_t{1} << 24)) {
            throw std::invalid_argument("markov_laplace: too many contexts");
        }
    }
    return Measure(alphabet,
                   std::make_shared<detail::MarkovLaplaceModel>(alphabet.size(), order),
                   order == 0 ? "laplace" : "laplace_k" + std::to_string(order));
}

// xi = sum_i w_i nu_i with renormalized weights.
inline Measure bayes_mixture(const std::vector<MixtureComponent>& components,
                             std::string name = "") {
    if (components.empty()) throw std::invalid_argument("bayes_mixture: no components");
    const Alphabet a = components.front().measure.alphabet();
    std::vector<Measure> ms;
    std::vector<double> raw;
    for (const auto& c : components) {
        if (!(c.measure.alphabet() == a)) {
            throw std::invalid_argument("bayes_mixture: components use different alphabets");
        }
        ms.push_back(c.measure);
        raw.push_back(c.weight);
    }
    WeightVector w(std::move(raw));
    if (name.empty()) {
        name = "mixture[";
        for (std::size_t i = 0; i < ms.size(); ++i) name += (i ? "," : "") + ms[i].name();
        name += "]";
    }
    return Measure(a, std::make_shared<detail::MixtureModel>(std::move(ms), w.values()),
                   std::move(name));
}

// sum_{k=0}^{k_max} w_k rho_L^k; default w_k proportional to 2^-(k+1).
inline Measure ryabko_mixture(const Alphabet& alphabet, std::size_t k_max,
                              std::optional<WeightVector> weights = std::nullopt) {
    const WeightVector w = weights ? *weights : WeightVector::geometric(k_max + 1);
    if (w.size() != k_max + 1) {
        throw std::invalid_argument("ryabko_mixture: need k_max + 1 weights");
    }
    std::vector<MixtureComponent> comps;
    for (std::size_t k = 0; k <= k_max; ++k) comps.push_back({markov_laplace(alphabet, k), w[k]});
    return bayes_mixture(comps, "ryabko(K=" + std::to_string(k_max) + ")");
}

// (1 - eps) rho + eps chi
inline Measure contaminate(const Measure& rho, const Measure& chi, double eps = 0.5) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("contaminate: eps must lie in (0,1)");
    }
    if (!(rho.alphabet() == chi.alphabet())) {
        throw std::invalid_argument("contaminate: alphabets differ");
    }
    return bayes_mixture({{rho, 1.0 - eps}, {chi, eps}},
                         "contaminate(" + rho.name() + "," + chi.name() + ")");
}

}  // namespace seqpred
