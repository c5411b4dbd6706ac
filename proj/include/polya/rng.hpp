#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace polya {

/// SplitMix64 finalizer. Used to derive per-trajectory seeds from
/// (master_seed, trajectory_index); this mixing function is part of the
/// reproducibility contract and must never change.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed of the random stream owned by trajectory `index` of an ensemble.
inline std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(master_seed ^ splitmix64(index + 1));
}

/// Random stream with documented, platform-independent draw semantics.
/// Wraps mt19937_64 (period 2^19937-1); all variate transforms are spelled
/// out here instead of relying on implementation-defined std distributions.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0,1): ((x>>11)+0.5) * 2^-53.
    /// Never returns 0 or 1, so -log(u) is finite and strictly positive.
    double uniform_open01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Exponential variate of the given rate by inversion on (0,1).
    double exponential(double rate) { return -std::log(uniform_open01()) / rate; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace polya
