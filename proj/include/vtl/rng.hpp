#pragma once

#include <cstdint>
#include <random>

namespace vtl {

// mt19937_64 with distributions written out here, so streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Uniform on [0, 1) with 53 bits.
    double uniform01();
    // Uniform integer on [lo, hi], unbiased.
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
    bool bernoulli(double p) { return uniform01() < p; }
    // Knuth's multiplication method; split for large means to stay clear of underflow.
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
};

} // namespace vtl
