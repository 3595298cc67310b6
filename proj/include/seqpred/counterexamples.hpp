#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "seqpred/measure.hpp"
#include "seqpred/predictors.hpp"
#include "seqpred/schedule.hpp"

namespace seqpred {

using SparseSchedule = StepSchedule;

// Dominance with vanishing c_n but no per-step prediction:
// mu is the point mass on 1^inf, rho agrees with it except that at every
// scheduled step it tosses a fair coin.
struct NodomPair {
    Measure mu;
    Measure rho;
    SparseSchedule schedule;

    // rho(1^n) = 2^-|{k : n_k <= n}|
    double rho_all_ones(std::uint64_t n) const {
        return std::ldexp(1.0, -static_cast<int>(schedule.count_up_to(n)));
    }
};

inline NodomPair nodom_pair(SparseSchedule schedule = SparseSchedule::pow2()) {
    const Alphabet bin = Alphabet::binary();
    Measure mu = make_constant_point_mass(bin, 1);
    Measure rho = make_schedule_measure(make_constant_point_mass(bin, 1), schedule,
                                        ConditionalDist{0.5, 0.5});
    return {std::move(mu), std::move(rho), std::move(schedule)};
}

// rho predicts mu on every step, yet (rho + chi)/2 does not: chi is exact
// off a doubly exponential schedule n_k = 2^(2^k) and badly wrong on it.
struct NosumadTriple {
    Measure mu;   // point mass on 1^inf
    Measure rho;  // independent, rho(x_n = 1) = n/(n+1)
    Measure chi;  // 1 except chi(x_{n_k} = 1) = n_{k-1}/n_k
    SparseSchedule schedule = SparseSchedule::double_exp();

    // rho(1^n) = 1/(n+1)
    static double rho_all_ones(std::uint64_t n) { return 1.0 / (static_cast<double>(n) + 1.0); }

    // chi(1^n) = 2/n_k for the last n_k <= n, and 1 before the first one
    double chi_all_ones(std::uint64_t n) const {
        const std::size_t k = schedule.count_up_to(n);
        if (k == 0) return 1.0;
        return 2.0 / static_cast<double>(*schedule.step(k));
    }

    // ((rho + chi)/2)(x_n = 1 | 1^{n-1}) from the closed-form marginals
    double contaminated_conditional(std::uint64_t n) const {
        if (n == 0) throw std::invalid_argument("contaminated_conditional: n must be >= 1");
        return (rho_all_ones(n) + chi_all_ones(n)) / (rho_all_ones(n - 1) + chi_all_ones(n - 1));
    }
};

inline NosumadTriple nosumad_triple() {
    const Alphabet bin = Alphabet::binary();
    Measure mu = make_constant_point_mass(bin, 1);
    Measure rho = make_independent(
        bin,
        [](std::uint64_t n) {
            const double p = static_cast<double>(n) / (static_cast<double>(n) + 1.0);
            return ConditionalDist{1.0 - p, p};
        },
        "independent(n/(n+1))");
    const auto sched = SparseSchedule::double_exp();
    Measure chi = make_schedule_measure(
        make_constant_point_mass(bin, 1), sched,
        [](std::uint64_t n) {
            // n = n_k = n_{k-1}^2, so n_{k-1}/n_k = 1/sqrt(n)
            const double p = 1.0 / std::sqrt(static_cast<double>(n));
            return ConditionalDist{1.0 - p, p};
        },
        "point_mass(1^inf)/spoiled@DOUBLE_EXP");
    return {std::move(mu), std::move(rho), std::move(chi), sched};
}

// rho predicts mu on average, (rho + chi)/2 does not even on average:
// mu is a fair coin, rho forces a 0 at scheduled steps, chi is Bernoulli(1/3).
struct NosumavadTriple {
    Measure mu;
    Measure rho;
    Measure chi;
    SparseSchedule schedule;
};

inline constexpr double kMaxScheduleDensity = 0.05;

// Rejects schedules whose density |{k : n_k <= h}|/h exceeds
// kMaxScheduleDensity at the checked horizon h.
inline NosumavadTriple nosumavad_triple(SparseSchedule schedule = SparseSchedule::cubic(),
                                        std::uint64_t density_horizon = 10000) {
    if (density_horizon == 0) throw std::invalid_argument("nosumavad_triple: horizon must be >= 1");
    const double density = static_cast<double>(schedule.count_up_to(density_horizon)) /
                           static_cast<double>(density_horizon);
    if (density > kMaxScheduleDensity) {
        throw std::invalid_argument("nosumavad_triple: schedule too dense (" +
                                    std::to_string(density) + " of steps up to " +
                                    std::to_string(density_horizon) + " are scheduled)");
    }
    Measure mu = make_bernoulli(0.5);
    Measure rho = make_schedule_measure(make_bernoulli(0.5), schedule, ConditionalDist{1.0, 0.0});
    Measure chi = make_bernoulli(1.0 / 3.0);
    return {std::move(mu), std::move(rho), std::move(chi), std::move(schedule)};
}

}  // namespace seqpred
