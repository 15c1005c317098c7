#include "slnorm/glk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "slnorm/detail/drift.hpp"
#include "slnorm/detail/evencos.hpp"
#include "slnorm/detail/format.hpp"
#include "slnorm/detail/gapsum.hpp"
#include "slnorm/detail/parallel.hpp"
#include "slnorm/errors.hpp"

namespace slnorm {
namespace {

constexpr double kPi = std::numbers::pi;

// Closed-form tails of the slow cosine series over u = x +- t.  With
// mu_n = n^2 + delta the n-th kernel term deviates from its reference by
//   -(delta/(2 pi)) [ u sin(n u)/n ]  -  (delta^2/(8 pi)) [ u^2 cos(n u)/n^2 ]
// per u in {x - t, x + t}, to second order in delta/n, and the norming
// deviation 1/a~_n - 2/pi = -(4/pi^2) a_drift/n^2 + o(1/n^2) adds
//   -(2 a_drift/pi^2) [ cos(n u)/n^2 ]
// per channel.  Summed over n >= N these need R_N(u) = sum_{n>=N} sin(nu)/n
// and C_N(u) = sum_{n>=N} cos(nu)/n^2, both elementary:
// sum_{n>=1} sin(nu)/n = (pi - u)/2 on (0, 2pi)  and
// sum_{n>=1} cos(nu)/n^2 = pi^2/6 - pi u/2 + u^2/4 on [0, 2pi].
//
// At u = 2pi (the (pi,pi) corner) the sawtooth is evaluated as its left
// limit -pi/2 rather than its pointwise value 0: the collocation rows need
// the kernel's interior limit, and the raw series value at the corner sits a
// full jump delta*pi/2 away from it.
struct TailTables {
    std::vector<double> correction; // indexed by k, u = k*pi/M, k = 0..2M

    TailTables(int M, int n_modes, double delta, double a_drift)
        : correction(2 * M + 1, 0.0) {
        if (delta == 0.0 && a_drift == 0.0)
            return;
        for (int k = 1; k <= 2 * M; ++k) {
            const double u = k * (kPi / M);
            const double saw = (k == 2 * M) ? -kPi / 2 : (kPi - u) / 2;
            const double cos2 = kPi * kPi / 6 - kPi * u / 2 + u * u / 4;
            double partial_saw = 0.0, partial_cos2 = 0.0;
            for (int n = 1; n < n_modes; ++n) {
                partial_saw += std::sin(n * u) / n;
                partial_cos2 += std::cos(n * u) / (double(n) * n);
            }
            const double r_tail = saw - partial_saw;
            const double c_tail = cos2 - partial_cos2;
            correction[k] = -(delta / (2 * kPi)) * u * r_tail
                            - (delta * delta / (8 * kPi)) * u * u * c_tail
                            - (2 * a_drift / (kPi * kPi)) * c_tail;
        }
    }
};

} // namespace

std::size_t KernelGrid::tri_index(int i, int j) const {
    return static_cast<std::size_t>(i) * (i + 1) / 2 + static_cast<std::size_t>(j);
}

double KernelGrid::x_of(int i) const { return i * (kPi / M); }

double KernelGrid::F_at(int i, int j) const {
    return j <= i ? F_values[tri_index(i, j)] : F_values[tri_index(j, i)];
}

double KernelGrid::G_at(int i, int j) const { return G_values[tri_index(i, j)]; }

KernelGrid build_F(const SpectralData& spectral, const NormingSet& norms, int M,
                   int N_modes, int workers) {
    if (M < 1)
        throw DomainError("kernel mesh needs M >= 1");
    if (N_modes < 1)
        throw DomainError("kernel truncation needs N_modes >= 1");
    if (static_cast<std::size_t>(N_modes) > spectral.records.size())
        throw DomainError("N_modes exceeds the number of computed eigenvalues");
    if (static_cast<std::size_t>(N_modes) > norms.count())
        throw DomainError("N_modes exceeds the number of norming constants");

    KernelGrid grid;
    grid.M = M;
    grid.N_modes = N_modes;
    grid.alpha = spectral.boundary.alpha;
    grid.beta = spectral.boundary.beta;
    grid.delta_bar = detail::fit_tail_drift(spectral.records, N_modes);
    grid.a_drift = detail::fit_norming_drift(norms.a_tilde, N_modes);
    grid.F_values.assign(KernelGrid::tri_size(M), 0.0);

    const double h = kPi / M;
    const TailTables tails(M, N_modes, grid.delta_bar, grid.a_drift);

    // Mode samples on the mesh: spectral cosines and free-string references.
    std::vector<std::vector<double>> spectral_cos(N_modes), reference_cos(N_modes);
    std::vector<double> inv_a_tilde(N_modes), inv_reference(N_modes);
    for (int n = 0; n < N_modes; ++n) {
        spectral_cos[n].resize(M + 1);
        reference_cos[n].resize(M + 1);
        for (int i = 0; i <= M; ++i) {
            spectral_cos[n][i] = detail::even_cosine(spectral.records[n].mu, i * h);
            reference_cos[n][i] = std::cos(double(n) * i * h);
        }
        inv_a_tilde[n] = 1.0 / norms.a_tilde[n];
        inv_reference[n] = detail::inverse_reference_norming(n);
    }

    const int nworkers = detail::resolve_workers(workers);
    detail::parallel_for(static_cast<std::size_t>(M + 1), nworkers, [&](std::size_t row) {
        const int i = static_cast<int>(row);
        for (int j = 0; j <= i; ++j) {
            // Kahan accumulation in mode order; at (0,0) every sample is
            // exactly 1, reproducing the trace series' arithmetic bit for bit.
            double sum = 0.0, comp = 0.0;
            for (int n = 0; n < N_modes; ++n) {
                double term = spectral_cos[n][i] * spectral_cos[n][j] * inv_a_tilde[n]
                              - reference_cos[n][i] * reference_cos[n][j] * inv_reference[n];
                double y = term - comp;
                double t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            grid.F_values[grid.tri_index(i, j)] =
                sum + tails.correction[i + j] + tails.correction[i - j];
        }
    });
    return grid;
}

void solve_G(KernelGrid& grid, int workers) {
    if (grid.F_values.size() != KernelGrid::tri_size(grid.M))
        throw DomainError("solve_G needs a grid with F filled");
    grid.G_values.assign(grid.F_values.size(), 0.0);
    grid.row_rcond.assign(grid.M + 1, 1.0);

    const double h = kPi / grid.M;
    // Degenerate first row: the integral term is empty.
    grid.G_values[0] = -grid.F_values[0];

    const int nworkers = detail::resolve_workers(workers);
    detail::parallel_for(static_cast<std::size_t>(grid.M), nworkers, [&](std::size_t r) {
        const int i = static_cast<int>(r) + 1;
        const int m = i + 1;
        Eigen::MatrixXd A(m, m);
        Eigen::VectorXd rhs(m);
        for (int j = 0; j < m; ++j) {
            for (int s = 0; s < m; ++s) {
                const double w = (s == 0 || s == i) ? 0.5 : 1.0;
                A(j, s) = (j == s ? 1.0 : 0.0) + h * w * grid.F_at(s, j);
            }
            rhs(j) = -grid.F_values[grid.tri_index(i, j)];
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        grid.row_rcond[i] = lu.rcond();
        Eigen::VectorXd g = lu.solve(rhs);
        std::copy(g.data(), g.data() + m, grid.G_values.begin() + grid.tri_index(i, 0));
    });

    grid.ill_conditioned_rows.clear();
    for (int i = 0; i <= grid.M; ++i)
        if (!(grid.row_rcond[i] >= 1e-12))
            grid.ill_conditioned_rows.push_back(i);
    grid.G_filled = true;
}

double verify_diagonal(const KernelGrid& grid, const Potential& q, double alpha) {
    if (!grid.G_filled)
        throw DomainError("verify_diagonal needs G filled");
    BoundaryParams bp(alpha, kPi / 2);
    const double cot_alpha = std::cos(bp.alpha) / std::sin(bp.alpha);
    double worst = 0.0;
    for (int i = 0; i <= grid.M; ++i) {
        const double target = -cot_alpha + 0.5 * q.integral_to(grid.x_of(i));
        worst = std::max(worst, std::abs(grid.G_at(i, i) - target));
    }
    return worst;
}

double verify_transmutation(const KernelGrid& grid, const Potential& q, double alpha,
                            double mu_probe, const OdeOptions& opt) {
    if (!grid.G_filled)
        throw DomainError("verify_transmutation needs G filled");
    BoundaryParams bp(alpha, kPi / 2);
    const double h = kPi / grid.M;

    std::vector<double> xs(grid.M);
    for (int i = 1; i <= grid.M; ++i)
        xs[i - 1] = grid.x_of(i);
    auto samples = solve_phi(q, mu_probe, bp.alpha, xs, opt);

    std::vector<double> probe_cos(grid.M + 1);
    for (int j = 0; j <= grid.M; ++j)
        probe_cos[j] = detail::even_cosine(mu_probe, grid.x_of(j));

    // Row 0 is exact by construction (empty integral, both sides equal 1).
    double worst = 0.0;
    const double inv_sin_alpha = 1.0 / std::sin(bp.alpha);
    for (int i = 1; i <= grid.M; ++i) {
        double integral = 0.0;
        for (int j = 0; j <= i; ++j) {
            const double w = (j == 0 || j == i) ? 0.5 : 1.0;
            integral += h * w * grid.G_at(i, j) * probe_cos[j];
        }
        const double represented = probe_cos[i] + integral;
        const double direct = samples[i - 1].y * inv_sin_alpha;
        worst = std::max(worst, std::abs(direct - represented));
    }
    return worst;
}

void dump_kernels_csv(const KernelGrid& grid, std::ostream& out) {
    out << "# M=" << grid.M << " N_modes=" << grid.N_modes
        << " alpha=" << detail::format_double(grid.alpha)
        << " beta=" << detail::format_double(grid.beta) << "\n";
    out << (grid.G_filled ? "i,j,x,t,F,G\n" : "i,j,x,t,F\n");
    for (int i = 0; i <= grid.M; ++i) {
        for (int j = 0; j <= i; ++j) {
            out << i << ',' << j << ',' << detail::format_double(grid.x_of(i)) << ','
                << detail::format_double(grid.x_of(j)) << ','
                << detail::format_double(grid.F_values[grid.tri_index(i, j)]);
            if (grid.G_filled)
                out << ',' << detail::format_double(grid.G_values[grid.tri_index(i, j)]);
            out << '\n';
        }
    }
}

} // namespace slnorm
