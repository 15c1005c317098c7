#pragma once

#include <cmath>

namespace slnorm::detail {

// cos(sqrt(mu) * t) extended evenly to mu < 0, where it becomes
// cosh(sqrt(-mu) * t).  As a function of mu this is entire (the power series
// sum (-mu)^k t^(2k) / (2k)! ), so no branch choice is involved; the
// cosine/cosh pair is just its stable evaluation.
inline double even_cosine(double mu, double t) {
    if (mu >= 0.0) return std::cos(std::sqrt(mu) * t);
    return std::cosh(std::sqrt(-mu) * t);
}

} // namespace slnorm::detail
