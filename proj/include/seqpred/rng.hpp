#pragma once

#include <cstdint>

namespace seqpred {

// Stateless counter-based uniform generator: the draw for (seed, stream,
// counter) depends on nothing else, so paths can be generated in any order
// and on any thread with identical results.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) : seed_(seed) {}

    constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t h = mix(seed_ ^ 0x243f6a8885a308d3ULL);
        h = mix(h ^ (stream + 0x13198a2e03707344ULL));
        h = mix(h ^ (counter + 0xa4093822299f31d0ULL));
        return h;
    }

    // uniform in [0, 1) with 53 random bits
    constexpr double uniform(std::uint64_t stream, std::uint64_t counter) const {
        return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t seed() const { return seed_; }

private:
    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

}  // namespace seqpred
