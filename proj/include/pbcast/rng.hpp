#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

namespace pbcast {

namespace detail {

// SplitMix64 finalizer. Bijective on 64 bits with full avalanche; chaining it
// over counters gives a stateless, randomly addressable stream.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace detail

// A named random stream addressed by counters instead of consumed state:
// the draw for counter (c0, c1, c2) is a pure function of (seed, label,
// c0, c1, c2). This allows any round of any stream to be regenerated
// without replaying history, and guarantees that draws from one stream
// are unaffected by how much any other stream is used.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::string label)
        : seed_(seed), label_(std::move(label)) {
        key_ = detail::mix64(detail::mix64(seed_) ^ detail::fnv1a64(label_));
    }

    std::uint64_t seed() const { return seed_; }
    const std::string& label() const { return label_; }

    std::uint64_t bits(std::uint64_t c0, std::uint64_t c1, std::uint64_t c2 = 0) const {
        std::uint64_t h = key_;
        h = detail::mix64(h ^ detail::mix64(c0 + 0x9e3779b97f4a7c15ull));
        h = detail::mix64(h ^ detail::mix64(c1 + 0x6a09e667f3bcc909ull));
        h = detail::mix64(h ^ detail::mix64(c2 + 0xbb67ae8584caa73bull));
        return h;
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform(std::uint64_t c0, std::uint64_t c1, std::uint64_t c2 = 0) const {
        return static_cast<double>(bits(c0, c1, c2) >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes sub-counters c2 = 1, 2.
    double normal(std::uint64_t c0, std::uint64_t c1) const {
        const double u1 = 1.0 - uniform(c0, c1, 1);  // (0, 1]
        const double u2 = uniform(c0, c1, 2);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    int rademacher(std::uint64_t c0, std::uint64_t c1) const {
        return (bits(c0, c1) & 1u) ? 1 : -1;
    }

private:
    std::uint64_t seed_;
    std::string label_;
    std::uint64_t key_;
};

}  // namespace pbcast
