#include <vtl/rng.hpp>

#include <cmath>
#include <limits>

namespace vtl {

double Rng::uniform01()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform(std::uint64_t lo, std::uint64_t hi)
{
    if (hi <= lo)
        return lo;
    const std::uint64_t span = hi - lo;
    if (span == std::numeric_limits<std::uint64_t>::max())
        return engine_();
    const std::uint64_t range = span + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return lo + x % range;
}

std::uint64_t Rng::poisson(double mean)
{
    if (!(mean > 0))
        return 0;
    std::uint64_t total = 0;
    while (mean > 30) {
        total += poisson(30);
        mean -= 30;
    }
    const double limit = std::exp(-mean);
    double prod = uniform01();
    std::uint64_t k = 0;
    while (prod > limit) {
        ++k;
        prod *= uniform01();
    }
    return total + k;
}

} // namespace vtl
