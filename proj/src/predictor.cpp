#include <vtl/predictor.hpp>

#include <cmath>
#include <string>

#include <vtl/types.hpp>

namespace vtl {

Prediction predict_g(double n, double p, double f)
{
    if (!(n > 1))
        throw error("predict_g: N must exceed 1");
    Prediction r;
    r.c = p * (n - 1);
    if (!(r.c > 1))
        throw error("predict_g: domain error, c = p(N-1) = " + std::to_string(r.c) + " must exceed 1");
    const double ln_n = std::log(n);
    r.g = 2.0 * f * r.c * ln_n / std::log(r.c);
    r.connected = p > ln_n / n;
    r.sparse = p * f * ln_n < 1.0;
    r.log_order = ln_n * ln_n / std::log(ln_n);
    return r;
}

} // namespace vtl
