#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "slnorm/detail/format.hpp"
#include "slnorm/detail/rk_coeffs.hpp"
#include "slnorm/errors.hpp"

namespace slnorm {

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;     // 0 = uncapped
    double initial_step = 0.0; // 0 = automatic selection
    std::size_t max_steps = 4000000;
};

namespace detail {

// Explicit Runge-Kutta 8(5,3) driver over a fixed-size state.  The right-hand
// side is any callable f(x, y, dy).  Steps are clipped to land exactly on
// requested output points; between clips the controller's natural step size
// is preserved so that dense sample grids do not degrade efficiency.
template <std::size_t N, class F>
class RkDriver {
public:
    RkDriver(F& f, double x0, const std::array<double, N>& y0, double x_end,
             const OdeOptions& opt)
        : f_(f), opt_(opt), x_(x0), y_(y0) {
        dir_ = x_end >= x0 ? 1.0 : -1.0;
        f_(x_, y_, k_[0]);
        double span = std::abs(x_end - x0);
        if (span > 0.0) {
            double hmax = span;
            if (opt_.max_step > 0.0) hmax = std::min(hmax, opt_.max_step);
            h_ = opt_.initial_step > 0.0 ? std::min(opt_.initial_step, hmax)
                                         : initial_step_guess(hmax);
        } else {
            h_ = 0.0;
        }
    }

    double x() const { return x_; }
    const std::array<double, N>& y() const { return y_; }

    // Advance to xt (which must not lie behind the current point).
    void step_to(double xt) {
        if ((xt - x_) * dir_ < 0.0)
            throw DomainError("integration target behind current point");
        bool rejected = false;
        while ((xt - x_) * dir_ > 0.0) {
            if (++steps_taken_ > opt_.max_steps)
                throw IntegrationError(
                    "step budget exhausted at x=" + format_double(x_), x_);
            double h = dir_ * std::abs(h_);
            if (opt_.max_step > 0.0 && std::abs(h) > opt_.max_step)
                h = dir_ * opt_.max_step;
            bool clipped = false;
            if ((x_ + 1.01 * h - xt) * dir_ >= 0.0) {
                h = xt - x_;
                clipped = true;
            }
            if (std::abs(h) <= 4.0 * eps_ * std::max(1.0, std::abs(x_)))
                throw IntegrationError(
                    "step size underflow at x=" + format_double(x_), x_);

            double err = stages_and_error(h);
            if (err <= 1.0) {
                x_ = clipped ? xt : x_ + h;
                y_ = ynew_;
                f_(x_, y_, k_[0]);
                double grow = next_factor(err);
                if (rejected) grow = std::min(grow, 1.0);
                if (!clipped) {
                    h_ = std::abs(h) * grow;
                } else if (grow < 1.0) {
                    // a rejected-then-clipped landing still informs the
                    // natural step; growth on a clipped step does not
                    h_ = std::min(h_, std::abs(h) * grow);
                }
                rejected = false;
            } else {
                rejected = true;
                double shrink = std::isfinite(err)
                                    ? std::min(next_factor(err), 1.0 / kFacMin)
                                    : 0.25;
                h_ = std::abs(h) * std::min(shrink, 0.9);
            }
        }
    }

private:
    static constexpr double kSafe = 0.9;
    static constexpr double kFacMin = 1.0 / 3.0; // max shrink per step
    static constexpr double kFacMax = 6.0;       // max growth per step

    // multiplicative step-size factor suggested by the error of the last step
    double next_factor(double err) const {
        if (err <= 0.0) return kFacMax;
        double fac = kSafe * std::pow(err, -1.0 / 8.0);
        return std::clamp(fac, kFacMin, kFacMax);
    }

    double initial_step_guess(double hmax) {
        // Hairer's hinit: balance |y| and |f|, then probe the second
        // derivative with one Euler step.
        double dnf = 0.0, dny = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sk = opt_.abs_tol + opt_.rel_tol * std::abs(y_[i]);
            dnf += (k_[0][i] / sk) * (k_[0][i] / sk);
            dny += (y_[i] / sk) * (y_[i] / sk);
        }
        double h0 = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6
                                                   : 0.01 * std::sqrt(dny / dnf);
        h0 = std::min(h0, hmax);
        std::array<double, N> y1, f1;
        for (std::size_t i = 0; i < N; ++i) y1[i] = y_[i] + dir_ * h0 * k_[0][i];
        f_(x_ + dir_ * h0, y1, f1);
        double der2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sk = opt_.abs_tol + opt_.rel_tol * std::abs(y_[i]);
            der2 += ((f1[i] - k_[0][i]) / sk) * ((f1[i] - k_[0][i]) / sk);
        }
        der2 = std::sqrt(der2) / h0;
        double der12 = std::max(der2, std::sqrt(dnf));
        double h1 = der12 <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                   : std::pow(0.01 / der12, 1.0 / 8.0);
        return std::min({100.0 * h0, h1, hmax});
    }

    // Run the 12 stages from (x_, y_) with step h; fill ynew_ and return the
    // combined 8(5,3) error measure (accept when <= 1).
    double stages_and_error(double h) {
        std::array<double, N> yi;
        for (int s = 1; s < rk_stages; ++s) {
            for (std::size_t i = 0; i < N; ++i) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j) acc += rk_a[s][j] * k_[j][i];
                yi[i] = y_[i] + h * acc;
            }
            f_(x_ + rk_c[s] * h, yi, k_[s]);
        }
        double err5 = 0.0, err3 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sumb = 0.0, sume = 0.0, sumh = 0.0;
            for (int j = 0; j < rk_stages; ++j) {
                sumb += rk_b[j] * k_[j][i];
                sume += rk_er[j] * k_[j][i];
                sumh += rk_bhh[j] * k_[j][i];
            }
            ynew_[i] = y_[i] + h * sumb;
            double sk = opt_.abs_tol +
                        opt_.rel_tol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
            double e5 = sume / sk;
            double e3 = (sumb - sumh) / sk;
            err5 += e5 * e5;
            err3 += e3 * e3;
        }
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0) deno = 1.0;
        return std::abs(h) * err5 / std::sqrt(static_cast<double>(N) * deno);
    }

    static constexpr double eps_ = std::numeric_limits<double>::epsilon();

    F& f_;
    const OdeOptions& opt_;
    double x_;
    std::array<double, N> y_;
    std::array<double, N> ynew_;
    std::array<double, N> k_[rk_stages];
    double dir_ = 1.0;
    double h_ = 0.0;
    std::size_t steps_taken_ = 0;
};

} // namespace detail

// Integrate y' = f(x, y) from x0 to x1 and return y(x1).
template <std::size_t N, class F>
std::array<double, N> integrate(F&& f, double x0, double x1,
                                const std::array<double, N>& y0,
                                const OdeOptions& opt = {}) {
    detail::RkDriver<N, F> drv(f, x0, y0, x1, opt);
    drv.step_to(x1);
    return drv.y();
}

// Integrate from x0, invoking cb(x, y) at every point of xs (which must be
// sorted along the direction of integration, starting no earlier than x0).
// Integration stops at xs.back(); sample points are hit exactly, not
// interpolated.
template <std::size_t N, class F, class CB>
void integrate_sampled(F&& f, double x0, std::span<const double> xs,
                       const std::array<double, N>& y0, CB&& cb,
                       const OdeOptions& opt = {}) {
    if (xs.empty()) return;
    detail::RkDriver<N, F> drv(f, x0, y0, xs.back(), opt);
    for (double xt : xs) {
        if (xt != drv.x()) drv.step_to(xt);
        cb(drv.x(), drv.y());
    }
}

} // namespace slnorm
