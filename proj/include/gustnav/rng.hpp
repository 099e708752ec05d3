#pragma once

#include <cstdint>
#include <random>

namespace gustnav {

// One master seed drives every random consumer in a run. Each consumer gets its
// own stream, addressed by a fixed index, so enabling/disabling one consumer
// never shifts the draws of another.
enum class Stream : std::uint32_t {
    TurbulenceU  = 0,
    TurbulenceV  = 1,
    TurbulenceW  = 2,
    Measurement  = 3,
    Particles    = 4,
    ParticleInit = 5,
    Ga           = 6,
};

/// SplitMix64 finalizer; full-period 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of sub-stream `index` under `master`.
constexpr std::uint64_t sub_seed(std::uint64_t master, std::uint32_t index) {
    return splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (std::uint64_t(index) + 1)));
}

constexpr std::uint64_t sub_seed(std::uint64_t master, Stream s) {
    return sub_seed(master, static_cast<std::uint32_t>(s));
}

/// Deterministic random stream: mt19937_64 plus hand-rolled uniform/normal
/// transforms. std::*_distribution is implementation-defined, so it is not used
/// anywhere results must be bit-reproducible.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n) {
        // multiply-shift; bias is < 2^-53 for the population sizes used here
        return std::size_t(uniform() * double(n)) % n;
    }

    /// Standard normal via Box-Muller, pair-cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so log() is finite
        const double u1 = double((engine_() >> 11) + 1) * 0x1.0p-53;
        const double u2 = double(engine_() >> 11) * 0x1.0p-53;
        const double r  = std::sqrt(-2.0 * std::log(u1));
        const double a  = 2.0 * 3.14159265358979323846 * u2;
        spare_     = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 engine_;
    double spare_    = 0.0;
    bool has_spare_  = false;
};

} // namespace gustnav
