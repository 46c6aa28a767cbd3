#pragma once

#include <cmath>
#include <cstdint>

namespace tspmdf {

// Counter-based pseudo-random generator built on the SplitMix64 finalizer
// (Steele, Lea & Flood, "Fast splittable pseudorandom number generators").
//
// A stream is identified by a 64-bit key; the i-th output of a stream is
// mix64(key + i*GAMMA). Sub-streams are derived by folding an index into the
// key, so a draw depends only on (seed, index path, draw position) and never
// on how many draws other streams have made. That makes parallel sampling
// reproducible by construction: give each worker its own stream.
//
// Exact construction (part of the reproducibility contract):
//   GAMMA = 0x9E3779B97F4A7C15
//   mix64(z): z ^= z>>30; z *= 0xBF58476D1CE4E5B9;
//             z ^= z>>27; z *= 0x94D049BB133111EB; z ^= z>>31
//   root key      = mix64(seed + GAMMA)
//   child key     = mix64(parent_key ^ mix64(index + GAMMA))
//   i-th output   = mix64(key + (i+1)*GAMMA)
//   double in [0,1) = (output >> 11) * 2^-53
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : key_(mix64(seed + kGamma)) {}

    // Child stream addressed by `index`; independent of this stream's
    // position. Chain calls to address nested loops, e.g.
    // rng.stream(epoch).stream(instance).stream(t).stream(sample).
    [[nodiscard]] Rng stream(std::uint64_t index) const {
        Rng child = *this;
        child.key_ = mix64(key_ ^ mix64(index + kGamma));
        child.counter_ = 0;
        return child;
    }

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound). Lemire multiply-shift; the modulo bias is
    // below 2^-60 for the small bounds used here.
    std::uint32_t next_below(std::uint32_t bound) {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // Index into a categorical distribution given by `probs[0..count)`.
    // Inverse-CDF walk; numerical tail mass falls on the last index.
    int pick_categorical(const double* probs, int count) {
        double u = next_double();
        double acc = 0.0;
        for (int i = 0; i < count; ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return count - 1;
    }

    // Standard normal via Box-Muller (one value per call; the sine branch is
    // discarded to keep the draw count per sample fixed).
    double next_gaussian() {
        double u1 = 1.0 - next_double();  // (0, 1], keeps the log finite
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace tspmdf
