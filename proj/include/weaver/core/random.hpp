#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace weaver {

// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

template <typename... Rest>
constexpr std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b, Rest... rest) {
    return mix_keys(mix_keys(a, b), static_cast<std::uint64_t>(rest)...);
}

// Hex digest used for output fingerprints in logs.
std::string digest_hex(std::string_view text);

/// Deterministic generator for one keyed stream. Streams are derived from
/// (seed, purpose, ids...) rather than shared, so results do not depend on
/// call order or thread interleaving.
class Rng {
public:
    explicit Rng(std::uint64_t key) : engine_(splitmix64(key)) {}

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    bool bernoulli(double p) { return uniform() < p; }
    std::uint64_t next() { return engine_(); }
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
    }
    double lognormal(double mu, double sigma) {
        if (sigma <= 0.0) return std::exp(mu);
        return std::lognormal_distribution<double>(mu, sigma)(engine_);
    }
    // Index drawn proportionally to non-negative weights; all-zero weights
    // fall back to uniform.
    std::size_t categorical(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
};

}  // namespace weaver
