#pragma once

#include <cstdint>

namespace qvi {

// Counter-based pseudo-random generator (SplitMix64). Every stochastic
// operation in the library takes an explicit 64-bit seed or an Rng stream,
// so runs are reproducible bit for bit on a given platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_int(std::uint64_t bound) {
        // Rejection sampling on the top bits keeps the draw exact.
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double rate) { return uniform() < rate; }

    // Standard normal via Box-Muller. Consumes two uniforms per call so the
    // stream position does not depend on call parity.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

  private:
    std::uint64_t state_;
};

// Derives an independent seed from a master seed and a stream index.
// Used to hand out fresh per-epoch / per-instance / per-estimator streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace qvi
