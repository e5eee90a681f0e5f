#pragma once

#include <cmath>
#include <cstdint>

namespace pnl {

/// Counter-based pseudo-random values: every draw is a pure function of a
/// 64-bit key chain, so results do not depend on call order or threading.
namespace rng {

inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t key(std::uint64_t a) { return mix(a); }
inline std::uint64_t key(std::uint64_t a, std::uint64_t b) { return mix(mix(a) ^ b); }
inline std::uint64_t key(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix(key(a, b) ^ c);
}
inline std::uint64_t key(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return mix(key(a, b, c) ^ d);
}

/// Uniform in (0,1), never exactly 0 or 1.
inline double uniform(std::uint64_t k) {
    return (static_cast<double>(k >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two decorrelated uniforms.
inline double gaussian(std::uint64_t k) {
    const double u1 = uniform(mix(k ^ 0xA5A5A5A5A5A5A5A5ull));
    const double u2 = uniform(mix(k ^ 0x5A5A5A5A5A5A5A5Aull));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Small sequential generator for test sampling; deterministic in its seed.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(mix(seed)) {}
    std::uint64_t next_key() { return state_ = mix(state_ + 0x9E3779B97F4A7C15ull); }
    double uniform() { return rng::uniform(next_key()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double gaussian() { return rng::gaussian(next_key()); }
    long uniform_index(long count) {
        return static_cast<long>(uniform() * static_cast<double>(count)) % count;
    }

private:
    std::uint64_t state_;
};

}  // namespace rng
}  // namespace pnl
