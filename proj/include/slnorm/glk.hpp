#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "slnorm/norming.hpp"

namespace slnorm {

// Triangular mesh data for the kernel pair (F, G) on the uniform grid
// x_i = i*pi/M, i = 0..M.  Both kernels are stored as the lower triangle in
// row-major order (row i holds entries j = 0..i); F is symmetric so F_at
// serves arbitrary index order, while G is defined only for t <= x.
struct KernelGrid {
    int M = 0;
    int N_modes = 0;
    double alpha = 0.0; // boundary angles carried for report/dump headers
    double beta = 0.0;
    // Fitted eigenvalue drift lim (mu_n - n^2) used by the series tail
    // completion in build_F.
    double delta_bar = 0.0;
    // Fitted norming drift lim n^2 (a~_n - pi/2), completing the slowly
    // decaying part of the 1/a~_n deviation in the same tail pass.
    double a_drift = 0.0;
    std::vector<double> F_values;
    std::vector<double> G_values;
    // Reciprocal condition estimates of the per-row collocation systems,
    // filled by solve_G; rows whose estimate drops below 1e-12 are listed in
    // ill_conditioned_rows (the solve still proceeds).
    std::vector<double> row_rcond;
    std::vector<int> ill_conditioned_rows;
    bool G_filled = false;

    static std::size_t tri_size(int m) {
        return static_cast<std::size_t>(m + 1) * static_cast<std::size_t>(m + 2) / 2;
    }
    std::size_t tri_index(int i, int j) const; // requires 0 <= j <= i <= M
    double x_of(int i) const;
    double F_at(int i, int j) const; // symmetric access, either index order
    double G_at(int i, int j) const; // requires j <= i
};

// Assemble F(x_i, t_j) = sum_n [ E(mu_n, x_i) E(mu_n, t_j)/a~n
//                                - cos(n x_i) cos(n t_j)/a0_n ]
// over the first N_modes eigenvalues, where E is the even cosine branch
// (admitting mu < 0) and a0_n is the free-string reference (pi, pi/2, ...).
// The truncated sum is completed by the closed-form tail of its slowly
// decaying part: writing mu_n = n^2 + delta + o(1), the terms beyond N_modes
// carry a sawtooth layer proportional to delta whose cosine series sums in
// closed form.  The completion is what keeps the kernel usable near the
// (pi, pi) corner, where the raw truncation error decays only like 1/N; it
// vanishes identically at (0,0), so F(0,0) stays bit-identical to the trace
// series' partial sum.  delta is fitted from the last quartile of the modes
// in use.  Workers > 1 parallelizes row assembly (entries are independent,
// so the result is identical).
KernelGrid build_F(const SpectralData& spectral, const NormingSet& norms, int M,
                   int N_modes, int workers = 1);

// Solve G(x_i, t) + F(x_i, t) + integral_0^{x_i} G(x_i, s) F(s, t) ds = 0
// row by row: Nystrom collocation on the mesh restricted to [0, x_i] with
// trapezoid weights, one dense LU solve per row.  Row 0 degenerates to
// G(0,0) = -F(0,0) exactly.  Rows are independent; workers > 1 solves them
// concurrently.
void solve_G(KernelGrid& grid, int workers = 1);

// Max over mesh points of |G(x,x) - (-cot(alpha) + (1/2) integral_0^x q)|.
double verify_diagonal(const KernelGrid& grid, const Potential& q, double alpha);

// Max over mesh points of the transmutation residual
//   | phi(x, mu)/sin(alpha) - [ E(mu, x) + integral_0^x G(x,t) E(mu, t) dt ] |
// with the integral taken by the same trapezoid rule as solve_G.  mu_probe
// may be any real number, eigenvalue or not.
double verify_transmutation(const KernelGrid& grid, const Potential& q, double alpha,
                            double mu_probe, const OdeOptions& opt = {});

// CSV dump of the triangular kernels for external plotting: a comment header
// with M, N_modes, alpha, beta, then one row per (i, j), j <= i, row-major.
// G columns are written only when filled.
void dump_kernels_csv(const KernelGrid& grid, std::ostream& out);

} // namespace slnorm
