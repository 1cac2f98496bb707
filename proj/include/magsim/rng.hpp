#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>

namespace magsim {

/// SplitMix64 finalizer; used to turn (seed, stream) pairs into independent
/// generator seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seedable generator for Monte Carlo substreams.
///
/// The engine is the 64-bit Mersenne Twister (MT19937-64); stream k of seed s
/// is seeded with splitmix64(splitmix64(s) ^ k). Poisson variates come from
/// Boost.Random's header implementation (inversion below mean 10, PTRS above),
/// so a given (seed, stream) yields the same sequence on every platform.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next() { return engine_(); }
    double uniform(); // [0, 1) with 53 random bits
    std::uint64_t poisson(double mean);

private:
    boost::random::mt19937_64 engine_;
};

} // namespace magsim
