#include "slnorm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "slnorm/detail/format.hpp"
#include "slnorm/errors.hpp"

namespace slnorm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEndpointSlack = 1e-9;

} // namespace

struct Potential::SampledData {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> y2; // spline second derivatives (order 3 only)
    int order = 1;

    double eval(double x) const {
        // clamp to the grid span; callers have already validated the domain
        x = std::clamp(x, xs.front(), xs.back());
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t k = static_cast<std::size_t>(
            std::clamp<std::ptrdiff_t>(it - xs.begin() - 1, 0,
                                       static_cast<std::ptrdiff_t>(xs.size()) - 2));
        double h = xs[k + 1] - xs[k];
        double a = (xs[k + 1] - x) / h;
        double b = 1.0 - a;
        if (order == 1) return a * ys[k] + b * ys[k + 1];
        return a * ys[k] + b * ys[k + 1] +
               ((a * a * a - a) * y2[k] + (b * b * b - b) * y2[k + 1]) * h * h / 6.0;
    }
};

Potential Potential::zero() {
    Potential p;
    p.kind_ = Kind::Zero;
    return p;
}

Potential Potential::constant(double c) {
    Potential p;
    p.kind_ = Kind::Constant;
    p.constant_ = c;
    return p;
}

Potential Potential::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    Potential p;
    p.kind_ = Kind::Polynomial;
    p.coeffs_ = std::make_shared<const std::vector<double>>(std::move(coeffs));
    return p;
}

Potential Potential::sampled(std::vector<double> xs, std::vector<double> ys, int order) {
    if (order != 1 && order != 3)
        throw DomainError("sampled interpolation order must be 1 or 3");
    if (xs.size() != ys.size())
        throw DomainError("sampled potential: xs and ys must have equal length");
    std::size_t need = order == 3 ? 3 : 2;
    if (xs.size() < need)
        throw DomainError("sampled potential: too few grid points");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw DomainError("sampled potential grid must be strictly increasing");
    if (xs.front() > kEndpointSlack || xs.back() < kPi - kEndpointSlack)
        throw DomainError("sampled potential grid must cover [0, pi]");

    auto data = std::make_shared<SampledData>();
    data->xs = std::move(xs);
    data->ys = std::move(ys);
    data->order = order;
    if (order == 3) {
        // natural cubic spline: tridiagonal sweep for the second derivatives
        std::size_t n = data->xs.size();
        const auto& x = data->xs;
        const auto& y = data->ys;
        std::vector<double> u(n, 0.0);
        data->y2.assign(n, 0.0);
        auto& y2 = data->y2;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
            double p = sig * y2[i - 1] + 2.0;
            y2[i] = (sig - 1.0) / p;
            double slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) -
                           (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
            u[i] = (6.0 * slope / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
        }
        for (std::size_t i = n - 1; i-- > 0;)
            y2[i] = y2[i] * y2[i + 1] + u[i];
    }

    Potential p;
    p.kind_ = Kind::Sampled;
    p.sampled_ = std::move(data);
    return p;
}

Potential Potential::expression(const std::string& body) {
    Potential p;
    p.kind_ = Kind::Expression;
    p.expr_ = std::make_shared<const ExpressionProgram>(body);
    return p;
}

double Potential::base_eval(double x) const {
    switch (kind_) {
    case Kind::Zero:
        return 0.0;
    case Kind::Constant:
        return constant_;
    case Kind::Polynomial: {
        const auto& c = *coeffs_;
        double v = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
        return v;
    }
    case Kind::Sampled:
        return sampled_->eval(x);
    case Kind::Expression:
        return (*expr_)(x);
    }
    return 0.0; // unreachable
}

double Potential::operator()(double x) const {
    if (!(x >= -kEndpointSlack && x <= kPi + kEndpointSlack))
        throw DomainError("potential evaluated outside [0, pi]: x=" +
                          detail::format_double(x));
    double xc = std::clamp(x, 0.0, kPi);
    double v = base_eval(reflected_ ? kPi - xc : xc) + offset_;
    if (!std::isfinite(v))
        throw DomainError("potential evaluation produced a non-finite value at x=" +
                          detail::format_double(x));
    return v;
}

Potential Potential::reflected() const {
    Potential p = *this;
    p.reflected_ = !p.reflected_;
    return p;
}

Potential Potential::shifted(double c) const {
    Potential p = *this;
    p.offset_ += c;
    return p;
}

double Potential::integral_to(double x, double abs_tol) const {
    if (!(x >= -kEndpointSlack && x <= kPi + kEndpointSlack))
        throw DomainError("integral_to: upper limit outside [0, pi]: x=" +
                          detail::format_double(x));
    double xc = std::clamp(x, 0.0, kPi);
    if (xc == 0.0) return 0.0;
    if (kind_ == Kind::Zero) return offset_ * xc;
    if (kind_ == Kind::Constant) return (constant_ + offset_) * xc;

    double err = 0.0, l1 = 0.0;
    double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [this](double s) { return (*this)(s); }, 0.0, xc,
        /*max_depth=*/15, /*tol=*/abs_tol, &err, &l1);
    if (err > abs_tol * std::max(1.0, l1) * 10.0)
        throw AccuracyError("integral_to did not reach the requested tolerance "
                            "(achieved " + detail::format_double(err) + ")", err);
    return value;
}

double Potential::sup_abs_estimate() const {
    if (kind_ == Kind::Zero) return std::abs(offset_);
    if (kind_ == Kind::Constant) return std::abs(constant_ + offset_);
    double m = 0.0;
    constexpr int kSamples = 1024;
    for (int i = 0; i <= kSamples; ++i)
        m = std::max(m, std::abs((*this)(kPi * i / kSamples)));
    return m;
}

std::string Potential::describe() const {
    std::string base;
    switch (kind_) {
    case Kind::Zero:
        base = "zero";
        break;
    case Kind::Constant:
        base = "constant(" + detail::format_double(constant_) + ")";
        break;
    case Kind::Polynomial: {
        base = "polynomial([";
        for (std::size_t i = 0; i < coeffs_->size(); ++i) {
            if (i) base += ",";
            base += detail::format_double((*coeffs_)[i]);
        }
        base += "])";
        break;
    }
    case Kind::Sampled:
        base = "sampled(n=" + std::to_string(sampled_->xs.size()) +
               ",order=" + std::to_string(sampled_->order) + ")";
        break;
    case Kind::Expression:
        base = "expression(" + expr_->source() + ")";
        break;
    }
    if (reflected_) base = "reflect(" + base + ")";
    if (offset_ != 0.0) base += "+" + detail::format_double(offset_);
    return base;
}

} // namespace slnorm
