#pragma once

#include <cmath>
#include <cstdint>

#include "arspi/errors.hpp"

namespace arspi {

// splitmix64: a tiny generator used only to expand a 64-bit seed into the
// 256-bit xoshiro state. Passing the same seed always yields the same chain.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

// xoshiro256++ with deterministic stream derivation.
//
// Streams: the 256-bit state is seeded from a splitmix64 chain started at
// seed ^ GOLDEN * (stream + 1). GOLDEN is odd, so for a fixed seed the map
// stream -> chain seed is injective and distinct streams never collide.
// MCMC chains use stream = chain index; predictive workers use
// stream = kPredictiveStreamBase + time index.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        SplitMix64 sm(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
        for (auto& word : s_) word = sm.next();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double draw_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1); safe as a log() argument.
    double draw_open_uniform() {
        double u = draw_uniform();
        while (u == 0.0) u = draw_uniform();
        return u;
    }

    // Standard normal via the Marsaglia polar method; caches the spare.
    double draw_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * draw_uniform() - 1.0;
            v = 2.0 * draw_uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    // exp(location + scale * N(0,1)).
    double draw_lognormal(double location, double scale) {
        if (!(scale > 0.0) || !std::isfinite(location) || !std::isfinite(scale))
            throw DomainError("draw_lognormal: location must be finite and scale > 0");
        return std::exp(location + scale * draw_normal());
    }

    // Marsaglia-Tsang squeeze method. Shapes below one use the
    // Gamma(shape + 1) draw scaled by U^{1/shape}.
    double draw_gamma(double shape, double scale) {
        if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale))
            throw DomainError("draw_gamma: shape and scale must be finite and > 0");
        if (shape < 1.0) {
            const double u = draw_open_uniform();
            return draw_gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = draw_normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = draw_open_uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    bool draw_bernoulli(double p) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("draw_bernoulli: p must lie in [0, 1]");
        return draw_uniform() < p;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace arspi
