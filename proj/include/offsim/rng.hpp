#pragma once
// Seeded random streams with portable draw helpers. Every random draw in the
// simulator goes through Rng: the std:: distributions are implementation
// defined, so identical seeds would not give identical traces across
// platforms if we used them directly.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace offsim {

// SplitMix64 step, used only to spread seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Stream tags so that independent consumers (tasks, channels, agents, ...)
// never share a stream even when they share a master seed.
enum class StreamTag : std::uint64_t {
    Task = 1,
    Channel = 2,
    Profile = 3,
    Agent = 4,
    GlobalInit = 5,
};

// Derives an independent stream seed from (master seed, tag, index).
inline std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t index) {
    std::uint64_t s = master;
    const std::uint64_t a = splitmix64(s);
    s ^= static_cast<std::uint64_t>(tag) * 0xD6E8FEB86659FD93ull;
    const std::uint64_t b = splitmix64(s);
    s ^= index * 0xCA5A826395121157ull;
    const std::uint64_t c = splitmix64(s);
    return a ^ (b << 1) ^ c;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform over {0, ..., n-1}.
    int uniform_int(int n) {
        const int v = static_cast<int>(uniform01() * n);
        return v < n ? v : n - 1;
    }

    // Exponential(1) by inversion; finite for every engine output.
    double exponential() { return -std::log1p(-uniform01()); }

    // Standard normal, Box-Muller with a cached spare.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace offsim
