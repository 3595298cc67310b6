#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqpred/alphabet.hpp"
#include "seqpred/log_prob.hpp"
#include "seqpred/rng.hpp"
#include "seqpred/schedule.hpp"

namespace seqpred {

// Sufficient statistics of a measure after consuming a history prefix.
// States are owned by a single evaluator; the model they come from is shared.
class MeasureState {
public:
    virtual ~MeasureState() = default;

    // mu(x_{t+1} = . | x_{1:t}) written into out (size = alphabet size)
    virtual void next(std::span<double> out) const = 0;
    virtual void advance(Symbol s) = 0;
    virtual std::unique_ptr<MeasureState> clone() const = 0;
};

class MeasureModel {
public:
    virtual ~MeasureModel() = default;
    virtual std::unique_ptr<MeasureState> start() const = 0;
};

class Tracker;

// A probability measure on X^infinity, given by its conditional rule.
// Immutable and cheap to copy; copies share the underlying model.
class Measure {
public:
    Measure(Alphabet alphabet, std::shared_ptr<const MeasureModel> model, std::string name)
        : alphabet_(alphabet), model_(std::move(model)), name_(std::move(name)) {
        if (!model_) throw std::invalid_argument("Measure: null model");
    }

    const Alphabet& alphabet() const { return alphabet_; }
    const std::string& name() const { return name_; }
    const MeasureModel& model() const { return *model_; }
    const std::shared_ptr<const MeasureModel>& model_ptr() const { return model_; }

    Tracker track() const;

    ConditionalDist conditional(std::span<const Symbol> x) const;
    LogProb marginal_log(std::span<const Symbol> x) const;

private:
    Alphabet alphabet_;
    std::shared_ptr<const MeasureModel> model_;
    std::string name_;
};

// Walks a measure along a history, exposing the next-symbol conditional and
// the log-marginal of the prefix consumed so far. Copyable.
class Tracker {
public:
    explicit Tracker(const Measure& m)
        : model_(m.model_ptr()), state_(model_->start()), cond_(m.alphabet().size(), 0.0) {
        refresh();
    }

    Tracker(const Tracker& o)
        : model_(o.model_), state_(o.state_->clone()), cond_(o.cond_), log_marginal_(o.log_marginal_),
          position_(o.position_) {}
    Tracker& operator=(const Tracker& o) {
        if (this != &o) *this = Tracker(o);
        return *this;
    }
    Tracker(Tracker&&) noexcept = default;
    Tracker& operator=(Tracker&&) noexcept = default;

    std::span<const double> conditional() const { return cond_; }
    double conditional(Symbol s) const { return cond_.at(s); }

    LogProb log_marginal() const { return log_marginal_; }
    std::size_t position() const { return position_; }

    void advance(Symbol s) {
        const double p = cond_.at(s);
        log_marginal_ *= LogProb::from_prob(std::min(p, 1.0));
        state_->advance(s);
        ++position_;
        refresh();
    }

private:
    void refresh() { state_->next(cond_); }

    std::shared_ptr<const MeasureModel> model_;  // keeps state_'s model alive
    std::unique_ptr<MeasureState> state_;
    std::vector<double> cond_;
    LogProb log_marginal_ = LogProb::one();
    std::size_t position_ = 0;
};

inline Tracker Measure::track() const { return Tracker(*this); }

inline ConditionalDist Measure::conditional(std::span<const Symbol> x) const {
    validate_history(alphabet_, x);
    Tracker t(*this);
    for (Symbol s : x) t.advance(s);
    auto c = t.conditional();
    return ConditionalDist(std::vector<double>(c.begin(), c.end()));
}

inline LogProb Measure::marginal_log(std::span<const Symbol> x) const {
    validate_history(alphabet_, x);
    Tracker t(*this);
    for (Symbol s : x) {
        t.advance(s);
        if (t.log_marginal().is_zero()) break;
    }
    return t.log_marginal();
}

inline LogProb marginal_log(const Measure& m, std::span<const Symbol> x) {
    return m.marginal_log(x);
}

// Inverse-CDF draw that never returns a zero-probability symbol.
inline Symbol draw_symbol(std::span<const double> probs, double u) {
    double cum = 0.0;
    Symbol last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        last_positive = static_cast<Symbol>(i);
        cum += probs[i];
        if (u < cum) return last_positive;
    }
    return last_positive;
}

// Sequential draw x_t ~ m(.|x_{<t}); uniforms come from (seed, stream, t).
inline History sample_path(const Measure& m, std::uint64_t seed, std::size_t n,
                           std::uint64_t stream = 0) {
    const CounterRng rng(seed);
    History x;
    x.reserve(n);
    Tracker t(m);
    for (std::size_t i = 0; i < n; ++i) {
        const Symbol s = draw_symbol(t.conditional(), rng.uniform(stream, i));
        x.push_back(s);
        t.advance(s);
    }
    return x;
}

namespace detail {

inline void check_normalized(std::span<const double> p, const char* what) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument(std::string(what) + ": probability outside [0,1]");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > kNormTolerance) {
        throw std::invalid_argument(std::string(what) + ": probabilities sum to " +
                                    std::to_string(sum));
    }
}

inline void copy_dist(const ConditionalDist& d, std::span<double> out) {
    if (d.size() != out.size()) {
        throw std::logic_error("conditional rule returned a vector of wrong size");
    }
    std::copy(d.probs().begin(), d.probs().end(), out.begin());
}

// state with only a step counter
template <class Model>
class StepState final : public MeasureState {
public:
    explicit StepState(const Model& m) : model_(&m) {}
    void next(std::span<double> out) const override { model_->at_step(step_ + 1, out); }
    void advance(Symbol) override { ++step_; }
    std::unique_ptr<MeasureState> clone() const override {
        return std::make_unique<StepState>(*this);
    }

private:
    const Model* model_;
    std::uint64_t step_ = 0;
};

class IidModel final : public MeasureModel {
public:
    explicit IidModel(std::vector<double> p) : p_(std::move(p)) {}
    std::unique_ptr<MeasureState> start() const override {
        return std::make_unique<StepState<IidModel>>(*this);
    }
    void at_step(std::uint64_t, std::span<double> out) const {
        std::copy(p_.begin(), p_.end(), out.begin());
    }

private:
    std::vector<double> p_;
};

class IndependentModel final : public MeasureModel {
public:
    using Rule = std::function<ConditionalDist(std::uint64_t)>;
    explicit IndependentModel(Rule r) : rule_(std::move(r)) {}
    std::unique_ptr<MeasureState> start() const override {
        return std::make_unique<StepState<IndependentModel>>(*this);
    }
    void at_step(std::uint64_t n, std::span<double> out) const { copy_dist(rule_(n), out); }

private:
    Rule rule_;
};

class PointMassModel final : public MeasureModel {
public:
    using Rule = std::function<Symbol(std::uint64_t)>;
    PointMassModel(std::size_t alphabet, Rule r) : alphabet_(alphabet), rule_(std::move(r)) {}
    std::unique_ptr<MeasureState> start() const override {
        return std::make_unique<StepState<PointMassModel>>(*this);
    }
    void at_step(std::uint64_t n, std::span<double> out) const {
        const Symbol s = rule_(n);
        if (s >= alphabet_) throw std::logic_error("point-mass rule left the alphabet");
        std::fill(out.begin(), out.end(), 0.0);
        out[s] = 1.0;
    }

private:
    std::size_t alphabet_;
    Rule rule_;
};

class MarkovModel final : public MeasureModel {
public:
    MarkovModel(std::size_t alphabet, std::size_t order, std::vector<double> table,
                std::vector<double> initial)
        : q_(alphabet), k_(order), table_(std::move(table)), initial_(std::move(initial)) {
        contexts_ = 1;
        for (std::size_t i = 0; i < k_; ++i) contexts_ *= q_;
    }

    class State final : public MeasureState {
    public:
        explicit State(const MarkovModel& m) : m_(&m) {}
        void next(std::span<double> out) const override {
            if (len_ >= m_->k_) {
                const double* row = &m_->table_[ctx_ * m_->q_];
                std::copy(row, row + m_->q_, out.begin());
                return;
            }
            // within the initial block: conditional of the prefix distribution
            const std::size_t block = m_->contexts_ / pow_q(len_ + 1);
            double total = 0.0;
            for (std::size_t a = 0; a < m_->q_; ++a) {
                const std::size_t lo = (ctx_ * m_->q_ + a) * block;
                double s = 0.0;
                for (std::size_t j = lo; j < lo + block; ++j) s += m_->initial_[j];
                out[a] = s;
                total += s;
            }
            for (std::size_t a = 0; a < m_->q_; ++a) {
                out[a] = total > 0.0 ? out[a] / total : 1.0 / static_cast<double>(m_->q_);
            }
        }
        void advance(Symbol s) override {
            ctx_ = m_->contexts_ == 1 ? 0 : (ctx_ * m_->q_ + s) % m_->contexts_;
            ++len_;
        }
        std::unique_ptr<MeasureState> clone() const override {
            return std::make_unique<State>(*this);
        }

    private:
        std::size_t pow_q(std::size_t e) const {
            std::size_t r = 1;
            for (std::size_t i = 0; i < e; ++i) r *= m_->q_;
            return r;
        }
        const MarkovModel* m_;
        std::size_t ctx_ = 0;
        std::size_t len_ = 0;
    };

    std::unique_ptr<MeasureState> start() const override { return std::make_unique<State>(*this); }

private:
    std::size_t q_;
    std::size_t k_;
    std::size_t contexts_;
    std::vector<double> table_;    // contexts_ rows of q_ entries
    std::vector<double> initial_;  // over length-k prefixes
};

class ScheduleModel final : public MeasureModel {
public:
    using Spoil = std::function<ConditionalDist(std::uint64_t)>;

    ScheduleModel(Measure base, StepSchedule schedule, Spoil spoil)
        : base_(std::move(base)), schedule_(std::move(schedule)), spoil_(std::move(spoil)) {}

    class State final : public MeasureState {
    public:
        explicit State(const ScheduleModel& m) : m_(&m), base_(m.base_.model().start()) {}
        State(const State& o) : m_(o.m_), base_(o.base_->clone()), step_(o.step_) {}

        void next(std::span<double> out) const override {
            if (m_->schedule_.contains(step_ + 1)) {
                copy_dist(m_->spoil_(step_ + 1), out);
            } else {
                base_->next(out);
            }
        }
        void advance(Symbol s) override {
            base_->advance(s);
            ++step_;
        }
        std::unique_ptr<MeasureState> clone() const override {
            return std::make_unique<State>(*this);
        }

    private:
        const ScheduleModel* m_;
        std::unique_ptr<MeasureState> base_;
        std::uint64_t step_ = 0;
    };

    std::unique_ptr<MeasureState> start() const override { return std::make_unique<State>(*this); }

private:
    Measure base_;
    StepSchedule schedule_;
    Spoil spoil_;
};

inline std::string format_probs(std::span<const double> p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", p[i]);
        s += buf;
    }
    return s + ")";
}

}  // namespace detail

// i.i.d. measure with per-step distribution probs.
inline Measure make_bernoulli(const Alphabet& alphabet, std::vector<double> probs) {
    if (probs.size() != alphabet.size()) {
        throw std::invalid_argument("make_bernoulli: probs size differs from alphabet size");
    }
    detail::check_normalized(probs, "make_bernoulli");
    auto name = "iid" + detail::format_probs(probs);
    return Measure(alphabet, std::make_shared<detail::IidModel>(std::move(probs)), name);
}

// Binary i.i.d. with P(x_t = 1) = p.
inline Measure make_bernoulli(double p) {
    return make_bernoulli(Alphabet::binary(), {1.0 - p, p});
}

// Order-k Markov chain. `table` has one row per context, rows indexed by the
// last k symbols read as a base-|X| number with the oldest symbol most
// significant. `initial` is the joint law of x_{1:k}, indexed the same way.
inline Measure make_markov(const Alphabet& alphabet, std::size_t order,
                           std::vector<std::vector<double>> table,
                           std::vector<double> initial) {
    const std::size_t q = alphabet.size();
    std::size_t contexts = 1;
    for (std::size_t i = 0; i < order; ++i) {
        if (contexts > (std::size_t{1} << 32) / q) {
            throw std::invalid_argument("make_markov: order too large");
        }
        contexts *= q;
    }
    if (table.size() != contexts) {
        throw std::invalid_argument("make_markov: table has " + std::to_string(table.size()) +
                                    " rows, expected " + std::to_string(contexts) +
                                    " (missing context row)");
    }
    if (initial.size() != contexts) {
        throw std::invalid_argument("make_markov: initial distribution must cover all " +
                                    std::to_string(contexts) + " prefixes");
    }
    std::vector<double> flat;
    flat.reserve(contexts * q);
    for (std::size_t c = 0; c < contexts; ++c) {
        if (table[c].size() != q) {
            throw std::invalid_argument("make_markov: row " + std::to_string(c) +
                                        " has wrong width");
        }
        detail::check_normalized(table[c], "make_markov row");
        flat.insert(flat.end(), table[c].begin(), table[c].end());
    }
    detail::check_normalized(initial, "make_markov initial");
    auto name = "markov" + std::to_string(order);
    return Measure(alphabet,
                   std::make_shared<detail::MarkovModel>(q, order, std::move(flat),
                                                         std::move(initial)),
                   name);
}

// Measure concentrated on the single sequence target(1), target(2), ...
inline Measure make_point_mass(const Alphabet& alphabet,
                               std::function<Symbol(std::uint64_t)> target,
                               std::string name = "point_mass") {
    return Measure(alphabet,
                   std::make_shared<detail::PointMassModel>(alphabet.size(), std::move(target)),
                   std::move(name));
}

inline Measure make_constant_point_mass(const Alphabet& alphabet, Symbol s) {
    if (!alphabet.contains(s)) throw std::invalid_argument("point mass symbol outside alphabet");
    return make_point_mass(alphabet, [s](std::uint64_t) { return s; },
                           "point_mass(" + std::to_string(s) + "^inf)");
}

// Independent but not identically distributed: x_n ~ rule(n).
inline Measure make_independent(const Alphabet& alphabet,
                                std::function<ConditionalDist(std::uint64_t)> rule,
                                std::string name = "independent") {
    return Measure(alphabet, std::make_shared<detail::IndependentModel>(std::move(rule)),
                   std::move(name));
}

// `base` everywhere except at scheduled steps n, where the conditional is
// spoil(n) regardless of the history.
inline Measure make_schedule_measure(Measure base, StepSchedule schedule,
                                     std::function<ConditionalDist(std::uint64_t)> spoil,
                                     std::string name = "") {
    const Alphabet a = base.alphabet();
    if (name.empty()) name = base.name() + "/spoiled@" + schedule.name();
    return Measure(a,
                   std::make_shared<detail::ScheduleModel>(std::move(base), std::move(schedule),
                                                           std::move(spoil)),
                   std::move(name));
}

inline Measure make_schedule_measure(Measure base, StepSchedule schedule, ConditionalDist spoil) {
    if (spoil.size() != base.alphabet().size()) {
        throw std::invalid_argument("make_schedule_measure: spoiled conditional size mismatch");
    }
    return make_schedule_measure(std::move(base), std::move(schedule),
                                 [spoil](std::uint64_t) { return spoil; });
}

}  // namespace seqpred
