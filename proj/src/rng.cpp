#include "magsim/rng.hpp"

#include "magsim/error.hpp"

#include <boost/random/poisson_distribution.hpp>
#include <cmath>
#include <fmt/format.h>

namespace magsim {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ stream)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw DomainError(fmt::format("poisson mean must be finite and >= 0, got {}", mean));
    if (mean == 0.0) return 0;
    boost::random::poisson_distribution<std::uint64_t, double> dist(mean);
    return dist(engine_);
}

} // namespace magsim
