#pragma once

#include <cstddef>
#include <vector>

#include "slnorm/spectrum.hpp"

namespace slnorm {

// Norming data for one spectrum, indexed like SpectralData::records.
//   a[n]      = integral of phi_n^2 over [0, pi]
//   b[n]      = integral of psi_n^2 over [0, pi]
//   c[n]      = multiplier with phi_n = c[n] * psi_n
//   a_tilde   = a / sin^2(alpha),  b_tilde = b / sin^2(beta)
//   c_deviation[n] = worst interior-sample deviation of phi/psi from c[n],
//                    relative to |c[n]|
struct NormingSet {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> c;
    std::vector<double> a_tilde;
    std::vector<double> b_tilde;
    std::vector<double> c_deviation;
    // loose large-n sanity of a_tilde -> pi/2 (drift bounded by C/n with C
    // fitted from the last quartile)
    bool tilde_asymptotic_ok = true;
    double max_tilde_drift = 0.0;

    std::size_t count() const { return a.size(); }
};

// Multiplier for one eigenvalue plus its interior-consistency diagnostic.
struct MultiplierResult {
    double c = 0.0;
    double max_deviation = 0.0; // max |phi/psi - c| / |c| over usable samples
    int usable_points = 0;
};

// L2-norm^2 of the left solution at a verified eigenvalue, accumulated as an
// extra quadrature state alongside the adaptive solve.
double norming_a(const Potential& q, const EigenRecord& record, double alpha,
                 const OdeOptions& opt = {});

// Same for the right solution.
double norming_b(const Potential& q, const EigenRecord& record, double beta,
                 const OdeOptions& opt = {});

// Multiplier c_n = phi(pi, mu_n)/sin(beta), with phi/psi compared at nine
// interior points as a residual check.  Sample points where |psi| falls
// below 1e-12 of its max are skipped; fewer than three usable points raises
// SamplingError.
MultiplierResult multiplier_c(const Potential& q, const EigenRecord& record,
                              double alpha, double beta,
                              const OdeOptions& opt = {});

// Full set for a computed spectrum (two augmented solves per index).
NormingSet compute_norming(const SpectralData& spectral,
                           const OdeOptions& opt = {}, int workers = 1);

// Max over n of |a_n + c_n * dPhi/dmu(mu_n)| / a_n: the norming constant of
// the left solution equals minus the multiplier times the derivative of the
// characteristic function.
double verify_norming_derivative_identity(const SpectralData& spectral,
                                          const NormingSet& norms);

} // namespace slnorm
