#pragma once

#include <cstdint>
#include <limits>

namespace sampcorr {

// Counter-based generator: output i is a SplitMix64 finalizer applied to key + i * gamma.
// split(tag) derives an independent key, so child streams never share state with the parent.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (counter_++) * kGamma); }

    CounterRng split(std::uint64_t tag) const {
        CounterRng child;
        child.key_ = mix(key_ ^ mix(tag + 0x9e3779b97f4a7c15ULL));
        child.counter_ = 0;
        return child;
    }

    // uniform double in [0,1)
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, bound)
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = max() - max() % bound;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % bound;
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t counter() const { return counter_; }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace sampcorr
