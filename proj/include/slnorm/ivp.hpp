#pragma once

#include <span>
#include <vector>

#include "slnorm/ode.hpp"
#include "slnorm/potential.hpp"

namespace slnorm {

// The Robin boundary angles (alpha at x=0, beta at x=pi), both restricted to
// the open interval (0, pi) so that sin(alpha) and sin(beta) never vanish.
struct BoundaryParams {
    double alpha;
    double beta;
    BoundaryParams(double a, double b);
};

struct SolutionSample {
    double x = 0.0;
    double y = 0.0;
    double yprime = 0.0;
    bool has_mu_derivative = false;
    double y_mu = 0.0;      // d(y)/d(mu), populated by the variational solve
    double yprime_mu = 0.0; // d(y')/d(mu)
};

// Solution of -y'' + q y = mu y with y(0) = sin(alpha), y'(0) = -cos(alpha),
// sampled at the strictly increasing grid xs within [0, pi].
std::vector<SolutionSample> solve_phi(const Potential& q, double mu, double alpha,
                                      std::span<const double> xs,
                                      const OdeOptions& opt = {});

// Solution with terminal data y(pi) = sin(beta), y'(pi) = -cos(beta),
// realized by integrating the reflected problem (potential q(pi-x)) forward.
std::vector<SolutionSample> solve_psi(const Potential& q, double mu, double beta,
                                      std::span<const double> xs,
                                      const OdeOptions& opt = {});

// As solve_phi, with the mu-derivative pair (v, v') carried along:
// -v'' + q v = mu v + y, v(0) = v'(0) = 0.
std::vector<SolutionSample> solve_phi_with_mu_derivative(
    const Potential& q, double mu, double alpha, std::span<const double> xs,
    const OdeOptions& opt = {});

// Phase theta(pi; mu) of the solution written as y = r sin(theta),
// y' = r cos(theta), with theta(0) = atan2(sin(alpha), -cos(alpha)) in (0, pi).
// Strictly increasing in mu; theta(pi; mu_n) = (n+1) pi - beta at the n-th
// eigenvalue.  Internally integrated in a frequency-scaled phase so the cost
// grows like sqrt(mu), not mu.
double prufer_angle(const Potential& q, double mu, double alpha,
                    const OdeOptions& opt = {});

} // namespace slnorm
