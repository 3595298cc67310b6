#pragma once

#include <string>
#include <vector>

#include "seqpred/measure.hpp"
#include "seqpred/predictors.hpp"

namespace seqpred::harness {

struct MeasurePair {
    std::string name;
    Measure mu;
    Measure rho;
};

// Fixed (true measure, predictor) pairs used by the verification suites.
inline std::vector<MeasurePair> builtin_pairs() {
    const Alphabet bin = Alphabet::binary();
    const Alphabet tri(3);
    const Measure sticky = make_markov(bin, 1, {{0.9, 0.1}, {0.3, 0.7}}, {0.5, 0.5});
    const Measure order2 = make_markov(bin, 2, {{0.8, 0.2}, {0.4, 0.6}, {0.5, 0.5}, {0.1, 0.9}},
                                       {0.25, 0.25, 0.25, 0.25});
    const Measure mix = bayes_mixture({{make_bernoulli(0.2), 0.4},
                                       {make_bernoulli(0.8), 0.4},
                                       {laplace(bin), 0.2}});
    return {
        {"bernoulli0.3/laplace", make_bernoulli(0.3), laplace(bin)},
        {"point_mass/laplace", make_constant_point_mass(bin, 1), laplace(bin)},
        {"markov1/markov_laplace1", sticky, markov_laplace(bin, 1)},
        {"markov1/ryabko3", sticky, ryabko_mixture(bin, 3)},
        {"markov2/markov_laplace2", order2, markov_laplace(bin, 2)},
        {"bernoulli0.5/mixture", make_bernoulli(0.5), mix},
        {"bernoulli0.2/contaminated_laplace", make_bernoulli(0.2),
         contaminate(laplace(bin), make_bernoulli(0.9))},
        {"bernoulli0.7/bernoulli0.6", make_bernoulli(0.7), make_bernoulli(0.6)},
        {"ternary/laplace3", make_bernoulli(tri, {0.2, 0.5, 0.3}), laplace(tri)},
    };
}

// Components of the mixture used to check xi >= w_i nu_i.
inline std::vector<MixtureComponent> builtin_mixture_components() {
    const Alphabet bin = Alphabet::binary();
    return {
        {make_bernoulli(0.25), 0.3},
        {make_markov(bin, 1, {{0.9, 0.1}, {0.2, 0.8}}, {0.5, 0.5}), 0.25},
        {laplace(bin), 0.2},
        {markov_laplace(bin, 1), 0.15},
        {make_constant_point_mass(bin, 0), 0.1},
    };
}

// Order-1 sources for the stationary trend check.
inline std::vector<MeasurePair> stationary_sources(std::size_t k_max) {
    const Alphabet bin = Alphabet::binary();
    const Measure rho = ryabko_mixture(bin, k_max);
    return {
        {"markov1_sticky", make_markov(bin, 1, {{0.9, 0.1}, {0.3, 0.7}}, {0.75, 0.25}), rho},
        {"markov1_alternating",
         make_markov(bin, 1, {{0.2, 0.8}, {0.85, 0.15}}, {0.85 / 1.65, 0.8 / 1.65}), rho},
        {"markov1_skewed", make_markov(bin, 1, {{0.6, 0.4}, {0.05, 0.95}}, {1.0 / 9, 8.0 / 9}), rho},
    };
}

}  // namespace seqpred::harness
