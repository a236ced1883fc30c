#pragma once

#include <cstdint>

namespace vtl {

struct Prediction {
    // Average connectivity c = p(N - 1).
    double c = 0;
    // 2 f c ln N / ln c.
    double g = 0;
    // p > ln N / N.
    bool connected = false;
    // p f ln N < 1, a finite-size stand-in for p = o(1 / (f ln N)).
    bool sparse = false;
    // ln^2 N / ln ln N, the order of g when p is of order ln N / N.
    double log_order = 0;
};

// N is real-valued so the closed form can be probed off the integers. Throws vtl::error when c <= 1.
Prediction predict_g(double n, double p, double f);

} // namespace vtl
