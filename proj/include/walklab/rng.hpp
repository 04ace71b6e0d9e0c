#pragma once

#include <cstdint>

namespace walklab {

// Deterministic 64-bit generator used everywhere in the lab.
//
// The core is SplitMix64 (Steele, Lea, Flood 2014): state advances by the
// golden-ratio increment 0x9E3779B97F4A7C15 and each output is the mix
//   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27; z *= 0x94D049BB133111EB;
//   z ^= z >> 31;
// Streams are derived by hashing (seed, stream_index) through the same mix,
// so replica results are independent of scheduling order and identical
// across platforms (pure uint64 arithmetic).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Stream `index` of a master seed; distinct indices give decorrelated
    // generators suitable for parallel replicas.
    static Rng stream(std::uint64_t master_seed, std::uint64_t index) {
        std::uint64_t s = mix(master_seed + 0x9E3779B97F4A7C15ULL * (index + 1));
        return Rng(mix(s ^ 0xD1B54A32D192ED03ULL));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform double in [0, 1), 53 significant bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) by rejection-free multiply-shift
    // (Lemire); bound must be nonzero.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    bool bernoulli(double p) { return next_double() < p; }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t state_;
};

} // namespace walklab
