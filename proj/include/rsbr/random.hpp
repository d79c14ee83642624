#pragma once

#include <cstdint>
#include <random>

namespace rsbr {

/// Per-replica random source. Variates are produced by explicit transforms
/// of the raw 64-bit engine output, so a given seed yields the same numbers
/// with every standard library.
class RandomStream {
public:
    explicit RandomStream(std::seed_seq& seeds) : engine_(seeds) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
    /// Exponential with unit rate.
    double exponential();
    /// Standard normal, Box-Muller without caching.
    double normal();

private:
    std::mt19937_64 engine_;
};

/// Maps (master seed, replica index) to an independent stream.
class RngPolicy {
public:
    explicit RngPolicy(std::uint64_t master_seed) : master_seed_(master_seed) {}

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    RandomStream stream_for(std::uint64_t replica_index) const;

private:
    std::uint64_t master_seed_;
};

}  // namespace rsbr
