#include "rsbr/random.hpp"

#include <cmath>
#include <numbers>

namespace rsbr {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

double RandomStream::exponential() { return -std::log(uniform()); }

double RandomStream::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RandomStream RngPolicy::stream_for(std::uint64_t replica_index) const {
    const std::uint64_t a = splitmix64(master_seed_);
    const std::uint64_t b = splitmix64(a ^ splitmix64(replica_index + 0x632be59bd9b4e019ULL));
    std::seed_seq seeds{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                        static_cast<std::uint32_t>(replica_index), static_cast<std::uint32_t>(replica_index >> 32)};
    return RandomStream(seeds);
}

}  // namespace rsbr
