#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace scca {

/// Portable seeded generator. Every draw is derived from the raw 64-bit
/// output of std::mt19937_64 (whose sequence is fixed by the standard), so
/// results do not depend on the standard library's distribution classes.
///
/// Streams: a (seed, stream) pair seeds the engine with
/// splitmix64(seed ^ splitmix64(stream)). Distinct streams of one seed are
/// statistically independent and can be replayed separately.
class Rng {
public:
    enum Stream : std::uint64_t {
        kPopulation = 1,
        kSamples = 2,
        kTestData = 3,
    };

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)))
    {}

    static std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open()
    {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    /// Uniform integer in [0, k).
    std::uint64_t below(std::uint64_t k) { return std::uint64_t(uniform() * double(k)); }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double t = 2.0 * 3.14159265358979323846 * uniform();
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::mt19937_64 engine_;
    double spare_{0};
    bool has_spare_{false};
};

} // namespace scca
