#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace roadsim {

// SplitMix64. Small, fast, and fully portable: simulation results must not
// depend on the standard library's distribution implementations.
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

// Collapses (master seed, purpose, coordinates...) into one substream seed.
// Every independent random decision in the artifact draws from its own
// substream, so results do not depend on iteration order.
inline std::uint64_t substream_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> keys) {
    SplitMix64 mix(master);
    std::uint64_t h = mix.next();
    for (std::uint64_t k : keys) {
        SplitMix64 step(h ^ k);
        h = step.next();
    }
    return h;
}

// Purpose tags for substream derivation.
namespace stream_purpose {
inline constexpr std::uint64_t kClassShuffle = 0x01;
inline constexpr std::uint64_t kPerception = 0x02;
inline constexpr std::uint64_t kCellSeed = 0x03;
}  // namespace stream_purpose

// Uniform / Gaussian draws on top of SplitMix64 (Box-Muller, no cached spare
// so that the k-th draw is a pure function of the seed and k).
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_.next() >> 11) * 0x1.0p-53; }

    // Standard normal.
    double gaussian() {
        double u1 = uniform01();
        if (u1 <= 0.0) {
            u1 = 0x1.0p-53;
        }
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Uniform integer in [0, bound) via rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_.next();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

  private:
    SplitMix64 engine_;
};

}  // namespace roadsim
