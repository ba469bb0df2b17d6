#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sfs {

/// Deterministic RNG wrapper. std::mt19937_64 supplies the raw stream, but
/// all derived draws (bounded ints, doubles, normals) are implemented here
/// explicitly so results do not depend on the standard library's
/// distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) by rejection; bound must be >= 1.
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    /// Standard normal via Box-Muller. Consumes two uniforms per call and
    /// returns the cosine branch only, keeping the stream position a simple
    /// function of the call count.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::mt19937_64 eng_;
};

/// SplitMix64 step, used to derive stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based seed splitter: independent (stream, counter) cells from one
/// master seed, so replicate work can run in any order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t counter = 0) {
    return splitmix64(splitmix64(master ^ splitmix64(stream)) ^ counter);
}

}  // namespace sfs
