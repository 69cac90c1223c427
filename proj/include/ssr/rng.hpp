#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>

namespace ssr {

// Deterministic xoshiro256++ generator. Streams are derived by hashing
// (seed, tag[, index]) so that e.g. train/validation/test draws never
// overlap by construction, and per-sample generation stays reproducible
// regardless of evaluation order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) { seed_state(seed); }

    static Rng from_stream(std::uint64_t seed, std::string_view tag) {
        return Rng(mix(seed, hash_tag(tag)));
    }

    static Rng from_stream(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
        return Rng(mix(mix(seed, hash_tag(tag)), splitmix(index + 0x9e3779b97f4a7c15ULL)));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Pair of independent standard normals (Box-Muller).
    std::pair<double, double> normal_pair() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto [a, b] = normal_pair();
        spare_ = b;
        have_spare_ = true;
        return a;
    }

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool have_spare_ = false;

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static std::uint64_t hash_tag(std::string_view tag) {
        // FNV-1a
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const char c : tag) {
            h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        return splitmix(a ^ rotl(b, 29));
    }

    void seed_state(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) {
            x = splitmix(x);
            word = x;
        }
        if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
    }
};

}  // namespace ssr
