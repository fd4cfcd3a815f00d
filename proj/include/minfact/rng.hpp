#pragma once

#include <array>
#include <cstdint>

namespace minfact {

// Deterministic random source: xoshiro256++ seeded through SplitMix64 from
// (seed, stream). Identical (seed, stream) yields an identical draw sequence
// on every platform. The distribution code below is part of that contract;
// std:: distributions are implementation-defined and must not be substituted.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed = 0, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        for (auto& w : state_) w = split_mix(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0,1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on {0,...,n-1}, unbiased (rejection sampling on the top range).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Poisson with mean 1 by inversion of a fixed cumulative table. The table
    // stops at k=20, where the remaining mass is below 1e-19.
    int next_poisson1() {
        static const std::array<double, kPoissonCut + 1> cdf = [] {
            std::array<double, kPoissonCut + 1> c{};
            double p = 0.36787944117144233;  // e^{-1}
            double acc = p;
            c[0] = acc;
            for (int k = 1; k <= kPoissonCut; ++k) {
                p /= k;
                acc += p;
                c[k] = acc;
            }
            return c;
        }();
        const double u = next_double();
        for (int k = 0; k < kPoissonCut; ++k) {
            if (u < cdf[k]) return k;
        }
        return kPoissonCut;
    }

    // Size-biased Poisson(1): P(k) = k e^{-1} / k!, i.e. 1 + Poisson(1).
    int next_size_biased_poisson1() { return 1 + next_poisson1(); }

private:
    static constexpr int kPoissonCut = 20;

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t split_mix(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace minfact
