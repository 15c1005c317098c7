#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

#include "slnorm/spectrum.hpp"

namespace slnorm::detail {

// Constant-drift fit of the eigenvalue asymptote mu_n = n^2 + delta + o(1):
// mean of mu_n - n^2 over the last quartile of the first `count` records.
// Below eight records the quartile is too thin to mean anything; callers get
// zero (no correction).
inline double fit_tail_drift(const std::vector<EigenRecord>& records, std::size_t count) {
    if (count < 8 || count > records.size())
        return 0.0;
    double sum = 0.0;
    std::size_t first = (3 * count) / 4;
    for (std::size_t n = first; n < count; ++n)
        sum += records[n].mu - double(n) * double(n);
    return sum / double(count - first);
}

// Same quartile fit for the norming asymptote a~_n = pi/2 + a_drift/n^2 +
// o(1/n^2): mean of n^2 (a~_n - pi/2) over the last quartile.
inline double fit_norming_drift(const std::vector<double>& a_tilde, std::size_t count) {
    if (count < 8 || count > a_tilde.size())
        return 0.0;
    double sum = 0.0;
    std::size_t first = (3 * count) / 4;
    for (std::size_t n = first; n < count; ++n)
        sum += double(n) * double(n) * (a_tilde[n] - std::numbers::pi / 2);
    return sum / double(count - first);
}

} // namespace slnorm::detail
