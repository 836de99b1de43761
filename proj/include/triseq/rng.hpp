#pragma once

// Deterministic splittable random streams. Each (seed, stream index) pair
// yields an independent generator whose output is a pure function of the
// pair, so parallel replication cannot perturb results.

#include <cmath>
#include <cstdint>

namespace triseq {

/// splitmix64 finalizer; used both as mixer and as generator core.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: output k of stream (seed, idx) is
/// mix64(key + k * GAMMA) where key itself is a mix of seed and idx.
class SplitRng {
public:
    SplitRng(std::uint64_t seed, std::uint64_t stream_index)
        : key_(mix64(mix64(seed) ^ mix64(stream_index ^ 0x5851f42d4c957f2dULL))),
          counter_(0) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * GAMMA); }

    /// Uniform double in (0, 1].
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pairs are cached.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    static constexpr std::uint64_t GAMMA = 0x9e3779b97f4a7c15ULL;
    std::uint64_t key_;
    std::uint64_t counter_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace triseq
