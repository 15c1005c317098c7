#pragma once

#include <memory>
#include <string>
#include <vector>

#include "slnorm/expression.hpp"

namespace slnorm {

// The potential q of the operator L(q, alpha, beta): a real-valued function
// on the fixed interval [0, pi].  Construction is by named kind; instances
// are immutable and cheap to copy (shared internals), so they can be read
// concurrently from any number of workers.
//
// Two modifiers are composed on top of the base function without changing
// its kind: `reflected` evaluates the base at pi - x (so reflecting twice is
// the identity, bit for bit), and `offset` adds a constant (used by the
// shift-covariance checks q -> q + c).
class Potential {
public:
    enum class Kind { Zero, Constant, Polynomial, Sampled, Expression };

    static Potential zero();
    static Potential constant(double c);
    // coeffs[k] multiplies x^k
    static Potential polynomial(std::vector<double> coeffs);
    // xs strictly increasing and covering [0, pi]; order 1 (piecewise linear,
    // default) or 3 (natural cubic spline)
    static Potential sampled(std::vector<double> xs, std::vector<double> ys,
                             int order = 1);
    static Potential expression(const std::string& body);

    // q(x) for x in [0, pi] (a hair of slack is allowed for integrator
    // roundoff at the endpoints); throws DomainError outside.
    double operator()(double x) const;

    // A potential evaluating to q(pi - x).
    Potential reflected() const;

    // A potential evaluating to q(x) + c.
    Potential shifted(double c) const;

    // Integral of q over [0, x] by adaptive 15-point Gauss-Kronrod
    // subdivision; throws AccuracyError if the absolute tolerance cannot be
    // met.  integral_to(0) is exactly 0.
    double integral_to(double x, double abs_tol = 1e-12) const;

    // Coarse upper estimate of sup |q| over [0, pi] (exact for the zero and
    // constant kinds, a 1025-point grid maximum otherwise).
    double sup_abs_estimate() const;

    Kind kind() const { return kind_; }
    bool is_reflected() const { return reflected_; }
    double offset() const { return offset_; }

    // Human-readable form for report echoes, e.g. "expression(x*(pi-x))".
    std::string describe() const;

private:
    Potential() = default;

    double base_eval(double x) const;

    Kind kind_ = Kind::Zero;
    bool reflected_ = false;
    double offset_ = 0.0;

    double constant_ = 0.0;
    std::shared_ptr<const std::vector<double>> coeffs_;
    struct SampledData;
    std::shared_ptr<const SampledData> sampled_;
    std::shared_ptr<const ExpressionProgram> expr_;
};

} // namespace slnorm
