#include "slnorm/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slnorm/detail/format.hpp"
#include "slnorm/errors.hpp"

namespace slnorm {

namespace {

constexpr double kPi = std::numbers::pi;

void check_angle(double a, const char* name) {
    if (!(a > 0.0 && a < kPi))
        throw DomainError(std::string(name) + " must lie in open interval (0, pi)");
}

void check_grid(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("sample grid must be nonempty");
    double prev = -1.0;
    for (double x : xs) {
        if (!(x >= -1e-12 && x <= kPi + 1e-12))
            throw DomainError("sample grid point outside [0, pi]: x=" +
                              detail::format_double(x));
        if (!(x > prev))
            throw DomainError("sample grid must be strictly increasing");
        prev = x;
    }
}

// A mild cap on the step size keeps localized features of q from being
// stepped over when the solution itself is slowly varying.
OdeOptions effective(const OdeOptions& opt) {
    OdeOptions e = opt;
    if (e.max_step <= 0.0) e.max_step = kPi / 16.0;
    return e;
}

} // namespace

BoundaryParams::BoundaryParams(double a, double b) : alpha(a), beta(b) {
    check_angle(a, "alpha");
    check_angle(b, "beta");
}

std::vector<SolutionSample> solve_phi(const Potential& q, double mu, double alpha,
                                      std::span<const double> xs,
                                      const OdeOptions& opt) {
    check_angle(alpha, "alpha");
    check_grid(xs);
    auto rhs = [&q, mu](double x, const std::array<double, 2>& y,
                        std::array<double, 2>& dy) {
        dy[0] = y[1];
        dy[1] = (q(x) - mu) * y[0];
    };
    std::array<double, 2> y0{std::sin(alpha), -std::cos(alpha)};
    std::vector<SolutionSample> out;
    out.reserve(xs.size());
    integrate_sampled<2>(rhs, 0.0, xs, y0,
                         [&out](double x, const std::array<double, 2>& y) {
                             out.push_back({x, y[0], y[1]});
                         },
                         effective(opt));
    return out;
}

std::vector<SolutionSample> solve_psi(const Potential& q, double mu, double beta,
                                      std::span<const double> xs,
                                      const OdeOptions& opt) {
    check_angle(beta, "beta");
    check_grid(xs);
    // u(s) := psi(pi - s) turns the terminal-value problem into an initial-
    // value problem for the reflected potential:
    //   -u'' + q(pi-s) u = mu u,  u(0) = sin(beta), u'(0) = +cos(beta).
    Potential qr = q.reflected();
    auto rhs = [&qr, mu](double s, const std::array<double, 2>& u,
                         std::array<double, 2>& du) {
        du[0] = u[1];
        du[1] = (qr(s) - mu) * u[0];
    };
    std::array<double, 2> u0{std::sin(beta), std::cos(beta)};
    std::vector<double> ss(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        ss[i] = kPi - xs[xs.size() - 1 - i];
    std::vector<SolutionSample> out(xs.size());
    std::size_t idx = 0;
    integrate_sampled<2>(rhs, 0.0, ss, u0,
                         [&](double s, const std::array<double, 2>& u) {
                             std::size_t slot = xs.size() - 1 - idx++;
                             out[slot] = {xs[slot], u[0], -u[1]};
                             (void)s;
                         },
                         effective(opt));
    return out;
}

std::vector<SolutionSample> solve_phi_with_mu_derivative(
    const Potential& q, double mu, double alpha, std::span<const double> xs,
    const OdeOptions& opt) {
    check_angle(alpha, "alpha");
    check_grid(xs);
    auto rhs = [&q, mu](double x, const std::array<double, 4>& y,
                        std::array<double, 4>& dy) {
        double qm = q(x) - mu;
        dy[0] = y[1];
        dy[1] = qm * y[0];
        dy[2] = y[3];
        dy[3] = qm * y[2] - y[0];
    };
    std::array<double, 4> y0{std::sin(alpha), -std::cos(alpha), 0.0, 0.0};
    std::vector<SolutionSample> out;
    out.reserve(xs.size());
    integrate_sampled<4>(rhs, 0.0, xs, y0,
                         [&out](double x, const std::array<double, 4>& y) {
                             out.push_back({x, y[0], y[1], true, y[2], y[3]});
                         },
                         effective(opt));
    return out;
}

double prufer_angle(const Potential& q, double mu, double alpha,
                    const OdeOptions& opt) {
    check_angle(alpha, "alpha");
    // Scaled phase: y = r sin(th), y' = om r cos(th) with om = sqrt(max(1,mu))
    // advances by ~om per unit x, so high-frequency solutions do not force
    // the raw (unscaled) phase equation's stiff wobble.
    double om = std::sqrt(std::max(1.0, mu));
    auto rhs = [&q, mu, om](double x, const std::array<double, 1>& th,
                            std::array<double, 1>& dth) {
        double s = std::sin(th[0]);
        double c = std::cos(th[0]);
        dth[0] = om * c * c + ((mu - q(x)) / om) * s * s;
    };
    std::array<double, 1> th0{std::atan2(std::sin(alpha), -std::cos(alpha) / om)};
    auto thp = integrate<1>(rhs, 0.0, kPi, th0, effective(opt));
    // Convert the scaled phase back to the plain atan2(y, y') phase.  Both
    // pass through multiples of pi together (y = 0), so the winding number
    // carries over; only the in-window angle needs remapping.
    double k = std::round(thp[0] / kPi);
    double rho = thp[0] - k * kPi;
    return k * kPi + std::atan2(std::sin(rho), om * std::cos(rho));
}

} // namespace slnorm
