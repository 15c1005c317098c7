#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace slnorm::detail {

// Reference inverse norming constant of the free Neumann string: 1/pi for
// the ground index, 2/pi above it.
inline double inverse_reference_norming(int n) {
    return n == 0 ? 1.0 / std::numbers::pi : 2.0 / std::numbers::pi;
}

// Kahan-compensated prefix sums of the gap series
//
//     sum_{n < stop} (1/a_tilde[n] - inverse_reference_norming(n))
//
// evaluated at each requested stop (stops must be nondecreasing, each
// <= a_tilde.size()).  Both the trace identities and the kernel value at the
// grid origin are defined through this exact accumulation, so every consumer
// funnels through here: same term order, same compensation, bit-identical
// results.
inline std::vector<double> gap_prefix_sums(const std::vector<double>& a_tilde,
                                           const std::vector<std::size_t>& stops) {
    std::vector<double> out;
    out.reserve(stops.size());
    double sum = 0.0, comp = 0.0;
    std::size_t n = 0;
    for (std::size_t stop : stops) {
        for (; n < stop; ++n) {
            double term = 1.0 / a_tilde[n] - inverse_reference_norming(static_cast<int>(n));
            double y = term - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        out.push_back(sum);
    }
    return out;
}

} // namespace slnorm::detail
