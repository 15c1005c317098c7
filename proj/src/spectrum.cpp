#include "slnorm/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "slnorm/detail/format.hpp"
#include "slnorm/errors.hpp"

namespace slnorm {

namespace {

constexpr double kPi = std::numbers::pi;

int sign_of(double v) { return v > 0.0 ? 1 : v < 0.0 ? -1 : 0; }

} // namespace

double characteristic_phi(const Potential& q, double mu, double alpha,
                          double beta, const OdeOptions& opt) {
    BoundaryParams bp(alpha, beta);
    std::array<double, 1> xs{kPi};
    auto s = solve_phi(q, mu, bp.alpha, xs, opt);
    return s[0].y * std::cos(bp.beta) + s[0].yprime * std::sin(bp.beta);
}

double characteristic_psi(const Potential& q, double mu, double alpha,
                          double beta, const OdeOptions& opt) {
    BoundaryParams bp(alpha, beta);
    std::array<double, 1> xs{0.0};
    auto s = solve_psi(q, mu, bp.beta, xs, opt);
    return s[0].y * std::cos(bp.alpha) + s[0].yprime * std::sin(bp.alpha);
}

CharacteristicPair characteristic_phi_with_derivative(const Potential& q,
                                                      double mu, double alpha,
                                                      double beta,
                                                      const OdeOptions& opt) {
    BoundaryParams bp(alpha, beta);
    std::array<double, 1> xs{kPi};
    auto s = solve_phi_with_mu_derivative(q, mu, bp.alpha, xs, opt);
    double cb = std::cos(bp.beta), sb = std::sin(bp.beta);
    return {s[0].y * cb + s[0].yprime * sb, s[0].y_mu * cb + s[0].yprime_mu * sb};
}

SpectralData find_eigenvalues(const Potential& q, double alpha, double beta,
                              int N, const SpectrumOptions& opt) {
    BoundaryParams bp(alpha, beta);
    if (N < 1) throw DomainError("eigenvalue count must be >= 1");

    const double supq = q.sup_abs_estimate();
    const double ceiling = std::isnan(opt.ceiling_override)
                               ? (double(N) + 2.0) * (double(N) + 2.0) + supq
                               : opt.ceiling_override;

    // The phase is integrated in scaled form, and mapping the scaled angle
    // back to the true one amplifies its error by up to sqrt(mu) near the
    // band edges, so the tolerance must shrink with mu to keep the measured
    // phase good to ~1e-3 rad.
    auto theta = [&](double mu) {
        OdeOptions bopt = opt.bracket;
        double cap = 3e-5 / std::max(30.0, std::abs(mu));
        bopt.rel_tol = std::min(bopt.rel_tol, cap);
        bopt.abs_tol = std::min(bopt.abs_tol, cap);
        return prufer_angle(q, mu, alpha, bopt);
    };
    auto ensure_below_ceiling = [&](double top, int idx) {
        if (top > ceiling + 1.0)
            throw SearchError("phase bracket for index " + std::to_string(idx) +
                              " not found below search ceiling " +
                              detail::format_double(ceiling));
    };

    SpectralData out{bp, q, {}, true, 0.0};
    out.records.reserve(static_cast<std::size_t>(N));

    const double cot_a = std::cos(alpha) / std::sin(alpha);
    const double cot_b = std::cos(beta) / std::sin(beta);
    // Below every eigenvalue: mu_0 >= -sup|q| - cot(alpha)^2-ish when the
    // alpha boundary binds (and symmetrically for beta), so pad with both.
    const double floor_guess = -1.0 - supq -
                               std::pow(std::max(0.0, cot_a), 2) -
                               std::pow(std::max(0.0, -cot_b), 2);

    // Phase window half-width that still isolates a single root of Phi
    // (adjacent roots of sin(theta+beta) are pi apart).
    constexpr double kWindow = 2.8;
    constexpr double kPhaseStop = 1e-2;

    double prev_mu = 0.0, prev_prev = 0.0;

    for (int n = 0; n < N; ++n) {
        const double target = (n + 1) * kPi - beta;
        const int parity = (n % 2 == 0) ? 1 : -1; // sign of Phi just below mu_n

        // ---- initial bracket [a, b] with theta(a) < target < theta(b)
        double a, b, ta, tb;
        if (n == 0) {
            a = floor_guess;
            int guard = 0;
            while ((ta = theta(a) - target) >= 0.0) {
                a -= std::max(4.0, 0.5 * std::abs(a));
                if (++guard > 80)
                    throw SearchError("no lower phase bracket for index 0");
            }
            b = std::max(a + 1.0, 1.0);
            ensure_below_ceiling(b, 0);
            while ((tb = theta(b) - target) <= 0.0) {
                a = b;
                ta = tb;
                b += std::max(4.0, 0.5 * std::abs(b));
                ensure_below_ceiling(b, 0);
            }
        } else {
            const double pred = n == 1 ? prev_mu + 3.0
                                       : 2.0 * prev_mu - prev_prev + 2.0;
            const double gap = std::max(1.0, pred - prev_mu);
            double cand = prev_mu + 0.3 * gap;
            double tc = theta(cand) - target;
            if (tc >= 0.0) {
                // predictor overshot: root lies just above the previous one,
                // whose phase (target - pi) is known without an evaluation
                b = cand;
                tb = tc;
                a = prev_mu + 1e-9 * std::max(1.0, std::abs(prev_mu));
                ta = -kPi;
            } else {
                a = cand;
                ta = tc;
                b = pred + 0.5 * gap;
                ensure_below_ceiling(b, n);
                while ((tb = theta(b) - target) <= 0.0) {
                    a = b;
                    ta = tb;
                    b += std::max(4.0, 0.5 * (b - prev_mu));
                    ensure_below_ceiling(b, n);
                }
            }
        }

        // ---- Illinois refinement until the bracket isolates the root and
        // one end sits essentially on it
        {
            double wa = ta, wb = tb; // damped weights for the secant step
            int last_side = 0;
            for (int it = 0;; ++it) {
                if (std::max(-ta, tb) <= kWindow &&
                    std::min(-ta, tb) <= kPhaseStop)
                    break;
                if (b - a <= 1e-9 * std::max(1.0, std::abs(b))) break;
                if (it > 200)
                    throw SearchError("phase refinement stalled for index " +
                                      std::to_string(n));
                double c;
                if (std::max(-ta, tb) > kWindow) {
                    c = 0.5 * (a + b); // shrink a still-wide window first
                } else {
                    c = (a * wb - b * wa) / (wb - wa);
                    double w = b - a;
                    c = std::clamp(c, a + 1e-3 * w, b - 1e-3 * w);
                }
                double tc = theta(c) - target;
                if (tc < 0.0) {
                    a = c;
                    ta = tc;
                    wa = tc;
                    if (last_side < 0) wb *= 0.5;
                    last_side = -1;
                } else {
                    b = c;
                    tb = tc;
                    wb = tc;
                    if (last_side > 0) wa *= 0.5;
                    last_side = 1;
                }
            }
        }

        // ---- certify the bracket by the sign of Phi itself: the phase seed
        // can sit entirely on one side of the root, so march outward until
        // the endpoints straddle the sign change (parity below the root)
        double va = characteristic_phi(q, a, alpha, beta, opt.solve);
        double vb = characteristic_phi(q, b, alpha, beta, opt.solve);
        {
            double w = std::max(0.25 * (b - a),
                                1e-3 * (1.0 + std::abs(b)));
            int guard = 0;
            while (sign_of(vb) * parity > 0) { // b still below the root
                a = b;
                va = vb;
                b += w;
                w *= 2.0;
                vb = characteristic_phi(q, b, alpha, beta, opt.solve);
                if (++guard > 12)
                    throw SearchError(
                        "no characteristic sign change above the phase "
                        "bracket for index " + std::to_string(n));
            }
            guard = 0;
            while (sign_of(va) * parity < 0) { // a already above the root
                b = a;
                vb = va;
                a -= w;
                w *= 2.0;
                if (n > 0) {
                    double floor_n = prev_mu + 1e-12 * std::max(1.0, std::abs(prev_mu));
                    if (a < floor_n) a = floor_n;
                }
                va = characteristic_phi(q, a, alpha, beta, opt.solve);
                if (++guard > 12)
                    throw SearchError(
                        "no characteristic sign change below the phase "
                        "bracket for index " + std::to_string(n));
            }
        }

        // ---- safeguarded Newton on Phi inside the certified bracket
        double mu, phi;
        double dot = 0.0;
        bool have_dot = false;
        if (std::abs(va) <= std::abs(vb)) {
            mu = a;
            phi = va;
        } else {
            mu = b;
            phi = vb;
        }
        double best_mu = mu, best_abs = std::numeric_limits<double>::infinity();
        double best_dot = 0.0;
        bool converged = false;
        for (int it = 0; it < opt.max_polish_iterations; ++it) {
            if (!have_dot) {
                auto p = characteristic_phi_with_derivative(q, mu, alpha, beta,
                                                            opt.solve);
                phi = p.value;
                dot = p.derivative;
                have_dot = true;
            }
            double scale = std::max(1.0, std::abs(mu));
            if (std::abs(phi) < best_abs) {
                best_abs = std::abs(phi);
                best_mu = mu;
                best_dot = dot;
            }
            if (std::abs(phi) <= opt.root_tol * scale) {
                converged = true;
                break;
            }
            if (sign_of(phi) * parity > 0)
                a = mu; // still below the root
            else if (sign_of(phi) * parity < 0)
                b = mu;
            double cand = dot != 0.0 ? mu - phi / dot : 0.5 * (a + b);
            if (!(cand > a && cand < b)) cand = 0.5 * (a + b);
            if (b - a <= 8.0 * std::numeric_limits<double>::epsilon() *
                             std::max(1.0, std::abs(b))) {
                // bracket at machine width: accept the best seen
                mu = best_mu;
                dot = best_dot;
                converged = best_abs <= std::sqrt(opt.root_tol) * scale;
                break;
            }
            mu = cand;
            have_dot = false;
        }
        if (!converged)
            throw SearchError("root polish did not converge for index " +
                              std::to_string(n) + " (best |Phi|=" +
                              detail::format_double(best_abs) + ")");

        const double dot_floor = 1e-6 * (kPi / 2.0) * std::sin(alpha) * std::sin(beta);
        if (!(std::abs(dot) >= dot_floor))
            throw SearchError("characteristic derivative vanishes at index " +
                              std::to_string(n) +
                              " (simple eigenvalues have nonzero derivative)");
        if (n > 0 && !(mu > prev_mu))
            throw SearchError("eigenvalues out of order at index " +
                              std::to_string(n));

        out.records.push_back({n, mu, std::sqrt(std::abs(mu)), mu < 0.0, dot});
        prev_prev = prev_mu;
        prev_mu = mu;
    }

    // ---- loose tail sanity: |mu_n - n^2| bounded by a constant fitted from
    // the last quartile
    if (N > 10) {
        double cfit = 0.0;
        for (int n = std::max(10, (3 * N) / 4); n < N; ++n)
            cfit = std::max(cfit, std::abs(out.records[n].mu - double(n) * n));
        double bound = 2.0 * cfit + 1.0;
        for (int n = 10; n < N; ++n) {
            double drift = std::abs(out.records[n].mu - double(n) * n);
            out.max_tail_drift = std::max(out.max_tail_drift, drift);
            if (drift > bound) out.asymptotic_ok = false;
        }
    }
    return out;
}

double verify_reflection_symmetry(const Potential& q, double alpha, double beta,
                                  int N, const SpectrumOptions& opt) {
    auto direct = find_eigenvalues(q, alpha, beta, N, opt);
    auto mirrored = find_eigenvalues(q.reflected(), kPi - beta, kPi - alpha, N, opt);
    double worst = 0.0;
    for (int n = 0; n < N; ++n) {
        double d = std::abs(mirrored.records[n].mu - direct.records[n].mu) /
                   (1.0 + std::abs(direct.records[n].mu));
        worst = std::max(worst, d);
    }
    return worst;
}

} // namespace slnorm
