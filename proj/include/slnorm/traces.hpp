#pragma once

#include "slnorm/norming.hpp"

namespace slnorm {

// Outcome of summing one of the two regularized series
//
//     1/a~0 - 1/pi + sum_{n>=1} (1/a~n - 2/pi)  =  cot(alpha)
//     1/b~0 - 1/pi + sum_{n>=1} (1/b~n - 2/pi)  =  -cot(beta)
//
// with Richardson extrapolation over the partial-sum ladder N/4, N/2, N.
// When the ladder differences are non-monotone (or of mixed sign) the
// extrapolation is disabled: `extrapolated_value` then equals `partial_sum`
// and `extrapolation_ok` is false.  The residual is reported as computed,
// never clipped.
struct SeriesReport {
    int N_terms = 0;               // terms actually summed
    double partial_sum = 0.0;      // S_N
    double sum_quarter = 0.0;      // S_{N/4}
    double sum_half = 0.0;         // S_{N/2}
    double tail_estimate = 0.0;    // extrapolated_value - partial_sum
    double extrapolated_value = 0.0;
    double target = 0.0;           // cot(alpha), resp. -cot(beta)
    double residual = 0.0;         // |extrapolated_value - target|
    double tolerance = 0.0;        // max(5e-3, 3 |S_N - S_{N/2}|)
    bool extrapolation_ok = false;

    bool within_tolerance() const { return residual <= tolerance; }
};

// Ladder summary of an arbitrary vector of tilde-normalized constants
// against a target value: the machinery behind both identities, exposed so
// that reconstructed constants can be pushed through the exact same
// summation and extrapolation arithmetic.
SeriesReport extrapolate_gap_series(const std::vector<double>& tilde_constants,
                                    double target);

// Left-endpoint identity: gap series of the a~ constants against cot(alpha).
SeriesReport series_identity_a(const SpectralData& spectral, const NormingSet& norms,
                               double alpha);

// Right-endpoint identity: gap series of the b~ constants against -cot(beta).
SeriesReport series_identity_b(const SpectralData& spectral, const NormingSet& norms,
                               double beta);

} // namespace slnorm
