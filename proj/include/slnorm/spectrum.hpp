#pragma once

#include <cmath>
#include <vector>

#include "slnorm/ivp.hpp"
#include "slnorm/ode.hpp"
#include "slnorm/potential.hpp"

namespace slnorm {

// One located eigenvalue.  lambda = sqrt(mu) on the principal branch; for
// mu < 0 the magnitude sqrt(-mu) is stored with the imaginary flag set.
struct EigenRecord {
    int n = 0;
    double mu = 0.0;
    double lambda_abs = 0.0;
    bool lambda_imaginary = false;
    double phi_dot = 0.0; // d(Phi)/d(mu) at mu, from the variational solve
};

struct SpectrumOptions {
    // Convergence demand on the characteristic function:
    // |Phi(mu_n)| <= root_tol * max(1, |mu_n|).
    double root_tol = 1e-12;
    // Tight tolerances for characteristic-function and polish solves.
    OdeOptions solve;
    // Loose tolerances for the phase integrations used only to bracket.
    OdeOptions bracket;
    // Replaces the (N+2)^2 + sup|q| search ceiling when finite (used by
    // failure-path tests).
    double ceiling_override = std::nan("");
    int max_polish_iterations = 40;

    SpectrumOptions() {
        bracket.rel_tol = 1e-6;
        bracket.abs_tol = 1e-9;
    }
};

struct SpectralData {
    BoundaryParams boundary;
    Potential potential;
    std::vector<EigenRecord> records;
    // Loose tail sanity: drift mu_n - n^2 stays bounded over the computed
    // tail.  Diagnostic only; consumers decide whether to act on it.
    bool asymptotic_ok = true;
    double max_tail_drift = 0.0;

    std::size_t count() const { return records.size(); }
};

// Phi(mu) = phi(pi) cos(beta) + phi'(pi) sin(beta); zero exactly at the
// eigenvalues of L(q, alpha, beta).
double characteristic_phi(const Potential& q, double mu, double alpha,
                          double beta, const OdeOptions& opt = {});

// Psi(mu) = psi(0) cos(alpha) + psi'(0) sin(alpha); identically -Phi(mu).
double characteristic_psi(const Potential& q, double mu, double alpha,
                          double beta, const OdeOptions& opt = {});

// Phi and d(Phi)/d(mu) from one variational solve.
struct CharacteristicPair {
    double value;
    double derivative;
};
CharacteristicPair characteristic_phi_with_derivative(const Potential& q,
                                                      double mu, double alpha,
                                                      double beta,
                                                      const OdeOptions& opt = {});

// The first N eigenvalues in increasing order, indices 0..N-1.  Each index is
// bracketed by the phase condition theta(pi; mu) = (n+1) pi - beta (which
// cannot mislabel roots), then polished by safeguarded Newton on Phi.
SpectralData find_eigenvalues(const Potential& q, double alpha, double beta,
                              int N, const SpectrumOptions& opt = {});

// Max over n < N of |mu_n(q*, pi-beta, pi-alpha) - mu_n(q, alpha, beta)| /
// (1 + |mu_n|), computed from two independent solver runs.
double verify_reflection_symmetry(const Potential& q, double alpha, double beta,
                                  int N, const SpectrumOptions& opt = {});

} // namespace slnorm
