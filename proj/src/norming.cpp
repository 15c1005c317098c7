#include "slnorm/norming.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "slnorm/detail/parallel.hpp"
#include "slnorm/errors.hpp"
#include "slnorm/ode.hpp"

namespace slnorm {

namespace {

constexpr double kPi = std::numbers::pi;

OdeOptions effective(const OdeOptions& opt) {
    OdeOptions e = opt;
    if (e.max_step <= 0.0) e.max_step = kPi / 16.0;
    return e;
}

// One solve of y'' = (q - mu) y with the square of y accumulated as a third
// state, sampled at the nine interior tenths of [0, pi] and at pi.
struct AugmentedSolve {
    std::array<double, 10> value{}; // y at pi/10, ..., 9pi/10, pi
    double integral = 0.0;          // integral of y^2 over [0, pi]
    double terminal = 0.0;
};

AugmentedSolve run_augmented(const Potential& q, double mu, double y0,
                             double yp0, const OdeOptions& opt) {
    auto rhs = [&q, mu](double x, const std::array<double, 3>& y,
                        std::array<double, 3>& dy) {
        dy[0] = y[1];
        dy[1] = (q(x) - mu) * y[0];
        dy[2] = y[0] * y[0];
    };
    std::array<double, 10> xs;
    for (int i = 1; i <= 9; ++i) xs[i - 1] = i * kPi / 10.0;
    xs[9] = kPi;

    AugmentedSolve out;
    std::array<double, 3> y{y0, yp0, 0.0};
    int k = 0;
    try {
        integrate_sampled<3>(rhs, 0.0, xs, y,
                             [&](double, const std::array<double, 3>& yy) {
                                 out.value[k] = yy[0];
                                 if (k == 9) {
                                     out.integral = yy[2];
                                     out.terminal = yy[0];
                                 }
                                 ++k;
                             },
                             effective(opt));
    } catch (const IntegrationError& e) {
        throw AccuracyError(std::string("norming quadrature failed: ") +
                                e.what(),
                            std::abs(e.where));
    }
    return out;
}

AugmentedSolve left_solve(const Potential& q, double mu, double alpha,
                          const OdeOptions& opt) {
    return run_augmented(q, mu, std::sin(alpha), -std::cos(alpha), opt);
}

// The right solution evaluated through the reflected problem: u(s) =
// psi(pi - s) satisfies the same equation with q reflected and leaves
// pi with u(0) = sin(beta), u'(0) = +cos(beta).  Its square integrates to
// the same value, and u at s recovers psi at pi - s.
AugmentedSolve right_solve(const Potential& q, double mu, double beta,
                           const OdeOptions& opt) {
    return run_augmented(q.reflected(), mu, std::sin(beta), std::cos(beta),
                         opt);
}

MultiplierResult finish_multiplier(const AugmentedSolve& fwd,
                                   const AugmentedSolve& bwd, double beta,
                                   int index) {
    MultiplierResult out;
    out.c = fwd.terminal / std::sin(beta);

    double psi_max = std::abs(std::sin(beta)); // psi(pi) itself
    for (double v : bwd.value) psi_max = std::max(psi_max, std::abs(v));

    const double cscale = std::max(std::abs(out.c),
                                   std::numeric_limits<double>::min());
    for (int i = 0; i < 9; ++i) {
        // phi sample i sits at (i+1)pi/10; psi there is u((9-i)pi/10)
        double psi_x = bwd.value[8 - i];
        if (std::abs(psi_x) < 1e-12 * psi_max) continue;
        double ratio = fwd.value[i] / psi_x;
        out.max_deviation =
            std::max(out.max_deviation, std::abs(ratio - out.c) / cscale);
        ++out.usable_points;
    }
    if (out.usable_points < 3)
        throw SamplingError(
            "fewer than 3 usable interior points for the multiplier at "
            "index " + std::to_string(index));
    return out;
}

} // namespace

double norming_a(const Potential& q, const EigenRecord& record, double alpha,
                 const OdeOptions& opt) {
    BoundaryParams bp(alpha, kPi / 2);
    return left_solve(q, record.mu, bp.alpha, opt).integral;
}

double norming_b(const Potential& q, const EigenRecord& record, double beta,
                 const OdeOptions& opt) {
    BoundaryParams bp(kPi / 2, beta);
    return right_solve(q, record.mu, bp.beta, opt).integral;
}

MultiplierResult multiplier_c(const Potential& q, const EigenRecord& record,
                              double alpha, double beta,
                              const OdeOptions& opt) {
    BoundaryParams bp(alpha, beta);
    auto fwd = left_solve(q, record.mu, bp.alpha, opt);
    auto bwd = right_solve(q, record.mu, bp.beta, opt);
    return finish_multiplier(fwd, bwd, bp.beta, record.n);
}

NormingSet compute_norming(const SpectralData& spectral, const OdeOptions& opt,
                           int workers) {
    const std::size_t n = spectral.records.size();
    const double alpha = spectral.boundary.alpha;
    const double beta = spectral.boundary.beta;
    const double sa2 = std::sin(alpha) * std::sin(alpha);
    const double sb2 = std::sin(beta) * std::sin(beta);

    NormingSet out;
    out.a.resize(n);
    out.b.resize(n);
    out.c.resize(n);
    out.a_tilde.resize(n);
    out.b_tilde.resize(n);
    out.c_deviation.resize(n);

    detail::parallel_for(n, workers, [&](std::size_t i) {
        const auto& rec = spectral.records[i];
        auto fwd = left_solve(spectral.potential, rec.mu, alpha, opt);
        auto bwd = right_solve(spectral.potential, rec.mu, beta, opt);
        if (!(fwd.integral > 0.0) || !(bwd.integral > 0.0))
            throw AccuracyError("nonpositive norm at index " +
                                    std::to_string(rec.n),
                                std::min(fwd.integral, bwd.integral));
        auto mult = finish_multiplier(fwd, bwd, beta, rec.n);
        out.a[i] = fwd.integral;
        out.b[i] = bwd.integral;
        out.c[i] = mult.c;
        out.c_deviation[i] = mult.max_deviation;
        out.a_tilde[i] = fwd.integral / sa2;
        out.b_tilde[i] = bwd.integral / sb2;
    });

    // loose large-n sanity: |a_tilde - pi/2| <= C/n with C fitted on the
    // last quartile
    if (n > 10) {
        double cfit = 0.0;
        for (std::size_t i = std::max<std::size_t>(10, (3 * n) / 4); i < n; ++i)
            cfit = std::max(cfit, std::abs(out.a_tilde[i] - kPi / 2) * double(i));
        double bound = 2.0 * cfit + 1.0;
        for (std::size_t i = 10; i < n; ++i) {
            double drift = std::abs(out.a_tilde[i] - kPi / 2) * double(i);
            out.max_tilde_drift = std::max(out.max_tilde_drift, drift);
            if (drift > bound) out.tilde_asymptotic_ok = false;
        }
    }
    return out;
}

double verify_norming_derivative_identity(const SpectralData& spectral,
                                          const NormingSet& norms) {
    double worst = 0.0;
    for (std::size_t i = 0; i < norms.count(); ++i) {
        double r = std::abs(norms.a[i] +
                            norms.c[i] * spectral.records[i].phi_dot) /
                   norms.a[i];
        worst = std::max(worst, r);
    }
    return worst;
}

} // namespace slnorm
