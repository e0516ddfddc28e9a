#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "jl/errors.hpp"

namespace jl::rng {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 step (Steele/Lea/Vigna). Used both as the substream mixing
// function and to expand a seed into engine state.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += golden_gamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic random stream: xoshiro256++ seeded from a (master seed,
// substream index) pair.
//
// Substream contract: the engine state is the first four outputs of
// splitmix64 initialized at  seed XOR (index+1)*golden_gamma.  Every sampler
// below is built from integer arithmetic plus sqrt/log/pow, so a given
// (seed, index) pair reproduces the same draws on any platform with a
// faithful libm; on one platform reproduction is bit-for-bit.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t substream_index) {
        std::uint64_t sm = seed ^ ((substream_index + 1) * golden_gamma);
        for (auto& word : state_) word = splitmix64_next(sm);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = golden_gamma;
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

    // Uniform on [0,1), 53 random mantissa bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log() argument.
    double uniform01_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via the Marsaglia polar method; the spare deviate is
    // cached, so draws come in dependent pairs within one stream.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, r;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            r = u * u + v * v;
        } while (r >= 1.0 || r == 0.0);
        const double m = std::sqrt(-2.0 * std::log(r) / r);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    // Gamma(shape, 1) via Marsaglia–Tsang squeeze; shape < 1 boosted through
    // Gamma(shape+1) * U^(1/shape).
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::domain_error("rng::Stream::gamma: shape must be positive");
        if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform01_open(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline Stream substream(std::uint64_t seed, std::uint64_t index) { return Stream(seed, index); }

}
