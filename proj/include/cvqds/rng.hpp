#pragma once

// Seeded random source with platform-independent output. The engine is
// mt19937_64, whose sequence the standard fixes; the distributions are
// implemented here because the standard library's are not portable.

#include <cstdint>
#include <random>

namespace cvqds {

/// One step of splitmix64; used to spread seeds and derive sub-streams.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent generator for sub-stream `index` of `seed`, so trials can
    /// be sharded across workers and still reproduce a serial run.
    static Rng stream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal, Box-Muller.
    double normal();
    /// Uniform integer in [0, n). Requires n > 0.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cvqds
