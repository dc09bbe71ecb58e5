#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace gbc {

/// Deterministic standard-normal stream: mt19937_64 driving a Box-Muller
/// transform. Both halves of the engine are fully specified by the C++
/// standard, so two builds given the same seed produce the same samples
/// bit for bit. Fixtures freeze values from this exact construction; any
/// change here must bump the tag.
class GaussianStream {
public:
    static constexpr std::string_view generator_tag = "mt19937_64/box-muller/v1";

    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    /// One N(0,1) sample.
    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0,1], u2 in [0,1); 53-bit mantissas from the raw stream.
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    static constexpr double kPi = 3.14159265358979323846;
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Uniform integer in [0, m) by rejection sampling on the raw 64-bit
/// stream; avoids std::uniform_int_distribution, whose output is
/// implementation-defined.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t m) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (max % m + 1) % m;  // 2^64 mod m
    std::uint64_t x = rng();
    while (rem != 0 && x > max - rem) x = rng();
    return x % m;
}

/// SplitMix64 finalizer; used to derive decorrelated seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over raw bytes; stable across platforms.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace gbc
