#pragma once

// Deterministic, platform-independent randomness.
//
// All stochastic components draw from SplitMix64.  Substreams are derived
// with `derive(tag, index)`, which mixes a textual tag and an index into the
// parent seed; the discipline is one substream per logical object (per
// constraint, per rounding trial, per hyperplane sample, ...) so that
// generation order never depends on evaluation order.  std::random
// distributions are avoided on purpose: their output is implementation
// defined.

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace soslab {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed0_(seed), state_(seed) {}

    // Core SplitMix64 step.
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Child stream keyed by (tag, index).  Children hang off the seed this
    // generator was constructed with, never off its consumed state, so the
    // substream an object sees cannot depend on evaluation order.
    Rng derive(std::string_view tag, std::uint64_t index = 0) const {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : tag) { h ^= static_cast<unsigned char>(c); h *= 1099511628211ull; }
        h ^= index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        Rng child(seed0_ ^ h);
        child.next();  // decorrelate from the raw xor
        return child;
    }

    // Uniform in [0, bound) by rejection (Lemire); exact for any bound.
    std::uint64_t uniform_u64(std::uint64_t bound) {
        // avoid modulo bias: draw until the value falls in the largest
        // multiple of `bound`
        std::uint64_t limit = (~0ull) - (~0ull) % bound;
        std::uint64_t v;
        do { v = next(); } while (v >= limit);
        return v % bound;
    }

    int uniform_int(int bound) { return static_cast<int>(uniform_u64(static_cast<std::uint64_t>(bound))); }

    bool coin() { return (next() >> 63) != 0; }

    // Uniform double in [0,1) with 53 random bits.
    double uniform_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (deterministic, no cached spare).
    double gaussian() {
        double u1, u2;
        do { u1 = uniform_double(); } while (u1 <= 0.0);
        u2 = uniform_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // k distinct values from [0, n), returned sorted.
    std::vector<int> sample_subset(int n, int k);

  private:
    std::uint64_t seed0_;
    std::uint64_t state_;
};

}  // namespace soslab
