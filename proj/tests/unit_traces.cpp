#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "slnorm/errors.hpp"
#include "slnorm/traces.hpp"

using namespace slnorm;

namespace {
constexpr double kPi = std::numbers::pi;

struct Pipeline {
    SpectralData spectral;
    NormingSet norms;
    Pipeline(const Potential& q, double alpha, double beta, int count)
        : spectral(find_eigenvalues(q, alpha, beta, count)),
          norms(compute_norming(spectral)) {}
};

const Pipeline& pi3_pipeline() {
    static Pipeline p(Potential::zero(), kPi / 3, kPi / 2, 400);
    return p;
}

NormingSet truncated(NormingSet n, std::size_t count) {
    n.a.resize(count);
    n.b.resize(count);
    n.c.resize(count);
    n.a_tilde.resize(count);
    n.b_tilde.resize(count);
    n.c_deviation.resize(count);
    return n;
}

// Norming set whose gap terms 1/a~n - ref_n are exactly the given values
// (b~ mirrors a~); used to drive the extrapolation control logic directly.
NormingSet synthetic_gaps(const std::vector<double>& gaps) {
    NormingSet n;
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        double ref = k == 0 ? 1.0 / kPi : 2.0 / kPi;
        double a_tilde = 1.0 / (ref + gaps[k]);
        n.a.push_back(a_tilde);
        n.b.push_back(a_tilde);
        n.c.push_back(1.0);
        n.a_tilde.push_back(a_tilde);
        n.b_tilde.push_back(a_tilde);
        n.c_deviation.push_back(0.0);
    }
    return n;
}
} // namespace

TEST_CASE("free string series vanish") {
    Pipeline p(Potential::zero(), kPi / 2, kPi / 2, 16);
    auto ra = series_identity_a(p.spectral, p.norms, kPi / 2);
    auto rb = series_identity_b(p.spectral, p.norms, kPi / 2);
    CHECK(std::abs(ra.target) < 1e-15); // cot(pi/2) up to rounding of pi/2
    CHECK(std::abs(rb.target) < 1e-15);
    CHECK(std::abs(ra.partial_sum) < 1e-8);
    CHECK(std::abs(ra.extrapolated_value) < 1e-8);
    CHECK(ra.residual < 1e-8);
    CHECK(std::abs(rb.extrapolated_value) < 1e-8);
    CHECK(rb.residual < 1e-8);
    CHECK(ra.within_tolerance());
    CHECK(rb.within_tolerance());
}

TEST_CASE("left identity approaches cot alpha") {
    const auto& p = pi3_pipeline();
    auto r = series_identity_a(p.spectral, p.norms, kPi / 3);
    CHECK(r.N_terms == 400);
    CHECK(r.target == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(r.extrapolation_ok);
    CHECK(r.residual <= 1e-4); // observed ~2e-6; generous regression bound
    CHECK(r.residual <= r.tolerance);
    CHECK(r.extrapolated_value ==
          doctest::Approx(r.partial_sum + r.tail_estimate).epsilon(1e-15));
    // ladder differences shrink (Cauchy-like behavior)
    CHECK(std::abs(r.partial_sum - r.sum_half) < std::abs(r.sum_half - r.sum_quarter));
}

TEST_CASE("right identity approaches minus cot beta") {
    Pipeline p(Potential::zero(), kPi / 2, kPi / 3, 400);
    auto r = series_identity_b(p.spectral, p.norms, kPi / 3);
    CHECK(r.target == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(r.extrapolation_ok);
    CHECK(r.residual <= 1e-4); // observed ~5e-6
}

TEST_CASE("extrapolated value is stable under truncation growth") {
    const auto& p = pi3_pipeline();
    auto r400 = series_identity_a(p.spectral, p.norms, kPi / 3);
    SpectralData half = p.spectral;
    half.records.resize(200);
    auto r200 = series_identity_a(half, truncated(p.norms, 200), kPi / 3);
    CHECK(std::abs(r400.extrapolated_value - r200.extrapolated_value) <= r200.residual);
}

TEST_CASE("gap terms decay at least linearly") {
    const auto& p = pi3_pipeline();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int n = 100; n < 400; ++n) {
        double term = 1.0 / p.norms.a_tilde[n] - 2.0 / kPi;
        double lx = std::log(double(n)), ly = std::log(std::abs(term));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    CHECK(-slope >= 1.0); // observed exponent ~2
    CHECK(-slope <= 3.0);
}

TEST_CASE("left identity does not depend on beta") {
    auto q = Potential::expression("sin(x)");
    Pipeline p1(q, kPi / 3, kPi / 3, 200);
    Pipeline p2(q, kPi / 3, 2 * kPi / 3, 200);
    auto r1 = series_identity_a(p1.spectral, p1.norms, kPi / 3);
    auto r2 = series_identity_a(p2.spectral, p2.norms, kPi / 3);
    double allowance = 2 * std::max(r1.residual, r2.residual);
    CHECK(std::abs(r1.extrapolated_value - r2.extrapolated_value) <= allowance);
}

TEST_CASE("right identity matches the reflected left identity") {
    auto q = Potential::expression("sin(x)");
    Pipeline direct(q, kPi / 3, 2 * kPi / 3, 200);
    Pipeline mirror(q.reflected(), kPi / 3, 2 * kPi / 3, 200);
    auto rb = series_identity_b(direct.spectral, direct.norms, 2 * kPi / 3);
    auto ra = series_identity_a(mirror.spectral, mirror.norms, kPi / 3);
    CHECK(ra.target == doctest::Approx(rb.target).epsilon(1e-14));
    double allowance = 2 * std::max(ra.residual, rb.residual);
    CHECK(std::abs(ra.extrapolated_value - rb.extrapolated_value) <= allowance);
}

TEST_CASE("alpha sweep reproduces the cotangent monotonically") {
    const double alphas[] = {kPi / 6, kPi / 4, kPi / 3, kPi / 2, 2 * kPi / 3};
    double previous = 0.0;
    bool first = true;
    for (double alpha : alphas) {
        Pipeline p(Potential::zero(), alpha, kPi / 2, 100);
        auto r = series_identity_a(p.spectral, p.norms, alpha);
        CHECK(r.residual <= r.tolerance);
        if (!first)
            CHECK(r.extrapolated_value < previous);
        previous = r.extrapolated_value;
        first = false;
    }
}

TEST_CASE("non-monotone ladder disables extrapolation") {
    Pipeline p(Potential::zero(), kPi / 2, kPi / 2, 16);
    std::vector<double> gaps(16, 0.0);
    gaps[4] = 0.1;   // S_half - S_quarter = +0.1
    gaps[8] = -0.05; // S_N - S_half = -0.05: sign flip
    auto norms = synthetic_gaps(gaps);
    auto r = series_identity_a(p.spectral, norms, kPi / 2);
    CHECK_FALSE(r.extrapolation_ok);
    CHECK(r.extrapolated_value == r.partial_sum);
    CHECK(r.tail_estimate == 0.0);
}

TEST_CASE("noise-level ladder differences disable extrapolation") {
    Pipeline p(Potential::zero(), kPi / 2, kPi / 2, 16);
    std::vector<double> gaps(16, 0.0);
    gaps[4] = 1e-3;
    gaps[8] = 1e-9; // ratio 1e6 is outside the trusted window
    auto norms = synthetic_gaps(gaps);
    auto r = series_identity_a(p.spectral, norms, kPi / 2);
    CHECK_FALSE(r.extrapolation_ok);
    CHECK(r.extrapolated_value == r.partial_sum);
}

TEST_CASE("input validation") {
    Pipeline p(Potential::zero(), kPi / 2, kPi / 2, 8);
    CHECK_THROWS_AS(series_identity_a(p.spectral, p.norms, 0.0), DomainError);
    CHECK_THROWS_AS(series_identity_a(p.spectral, p.norms, kPi), DomainError);
    CHECK_THROWS_AS(series_identity_b(p.spectral, p.norms, -0.3), DomainError);
    NormingSet empty;
    CHECK_THROWS_AS(series_identity_a(p.spectral, empty, kPi / 2), DomainError);
}
