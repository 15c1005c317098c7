#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "slnorm/errors.hpp"
#include "slnorm/spectrum.hpp"

using namespace slnorm;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("characteristic function closed forms for the free string") {
    auto q = Potential::zero();
    // alpha = beta = pi/2: Phi(mu) = -sqrt(mu) sin(sqrt(mu) pi)
    CHECK(std::abs(characteristic_phi(q, 1.0, kPi / 2, kPi / 2)) < 2e-9);
    CHECK(characteristic_phi(q, 0.25, kPi / 2, kPi / 2) ==
          doctest::Approx(-0.5).epsilon(1e-9));
    // alpha = pi/2, beta = pi/4: lowest root of cos(l pi) = l sin(l pi)
    CHECK(std::abs(characteristic_phi(q, 0.14703283096679435, kPi / 2, kPi / 4)) <
          2e-9);
}

TEST_CASE("left and right characteristic functions agree up to sign") {
    auto check_pair = [](const Potential& q, double mu, double a, double b) {
        double phi = characteristic_phi(q, mu, a, b);
        double psi = characteristic_psi(q, mu, a, b);
        CHECK(std::abs(phi + psi) <= 1e-8 * (1.0 + std::abs(phi)));
    };
    check_pair(Potential::zero(), 2.0, kPi / 3, kPi / 5);
    check_pair(Potential::expression("sin(x)"), 0.7, kPi / 2, kPi / 2);
    check_pair(Potential::constant(2.0), -1.5, kPi / 4, 2 * kPi / 3);
}

TEST_CASE("derivative of the characteristic function matches differences") {
    auto q = Potential::expression("sin(x)");
    double mu = 2.0, a = kPi / 3, b = kPi / 5;
    auto [value, der] = characteristic_phi_with_derivative(q, mu, a, b);
    double h = 1e-5;
    double fd = (characteristic_phi(q, mu + h, a, b) -
                 characteristic_phi(q, mu - h, a, b)) / (2 * h);
    CHECK(value == doctest::Approx(characteristic_phi(q, mu, a, b)).epsilon(1e-10));
    CHECK(der == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("free string with natural boundary angles yields squares") {
    auto data = find_eigenvalues(Potential::zero(), kPi / 2, kPi / 2, 10);
    REQUIRE(data.count() == 10);
    for (int n = 0; n < 10; ++n) {
        const auto& r = data.records[n];
        CHECK(r.n == n);
        CHECK(std::abs(r.mu - double(n) * n) < 1e-9);
        double dot_exact = n == 0 ? -kPi : -(kPi / 2) * (n % 2 == 0 ? 1.0 : -1.0);
        CHECK(r.phi_dot == doctest::Approx(dot_exact).epsilon(1e-7));
        if (n >= 1) {
            CHECK(!r.lambda_imaginary);
            CHECK(r.lambda_abs == doctest::Approx(double(n)).epsilon(1e-9));
            CHECK(r.mu > data.records[n - 1].mu);
        }
    }
    CHECK(data.asymptotic_ok);
}

TEST_CASE("constant shift moves the spectrum rigidly") {
    auto shifted = find_eigenvalues(Potential::constant(5.0), kPi / 2, kPi / 2, 3);
    double want[] = {5.0, 6.0, 9.0};
    for (int n = 0; n < 3; ++n)
        CHECK(std::abs(shifted.records[n].mu - want[n]) < 1e-8);

    auto base = Potential::expression("sin(x)");
    auto up = find_eigenvalues(base.shifted(2.5), kPi / 3, kPi / 5, 5);
    auto ref = find_eigenvalues(base, kPi / 3, kPi / 5, 5);
    for (int n = 0; n < 5; ++n) {
        double diff = up.records[n].mu - ref.records[n].mu - 2.5;
        CHECK(std::abs(diff) <= 1e-8 * (1.0 + std::abs(ref.records[n].mu)));
    }
}

TEST_CASE("robin angles detune the squares") {
    auto one = find_eigenvalues(Potential::zero(), kPi / 2, kPi / 4, 1);
    CHECK(std::abs(one.records[0].mu - 0.14703283096679435) < 1e-9);
    CHECK(!one.records[0].lambda_imaginary);

    // any alpha below pi/2 pulls the ground level under zero here
    auto five = find_eigenvalues(Potential::zero(), kPi / 3, kPi / 2, 5);
    double want[] = {-0.36472025640806952, 0.6420006112145203,
                     3.6343419750699506, 8.6332569575037647,
                     15.632896659607354};
    for (int n = 0; n < 5; ++n)
        CHECK(std::abs(five.records[n].mu - want[n]) <=
              1e-9 * (1.0 + std::abs(want[n])));
    CHECK(five.records[0].lambda_imaginary);
}

TEST_CASE("negative ground level appears for a steep left angle") {
    auto data = find_eigenvalues(Potential::zero(), kPi / 6, kPi / 2, 3);
    double want[] = {-3.0002252588077452, 0.36887729455488520,
                     3.0688202355017884};
    for (int n = 0; n < 3; ++n)
        CHECK(std::abs(data.records[n].mu - want[n]) <=
              1e-9 * (1.0 + std::abs(want[n])));
    CHECK(data.records[0].lambda_imaginary);
    CHECK(data.records[0].lambda_abs ==
          doctest::Approx(std::sqrt(3.0002252588077452)).epsilon(1e-9));
    CHECK(!data.records[1].lambda_imaginary);
}

TEST_CASE("eigenvalue search respects the ceiling") {
    SpectrumOptions opt;
    opt.ceiling_override = 0.5;
    CHECK_THROWS_AS(find_eigenvalues(Potential::zero(), kPi / 2, kPi / 2, 2, opt),
                    SearchError);
}

TEST_CASE("reflected problem has the same spectrum") {
    CHECK(verify_reflection_symmetry(Potential::expression("sin(x)"), kPi / 3,
                                     kPi / 5, 6) <= 1e-8);
    CHECK(verify_reflection_symmetry(Potential::expression("exp(0-x)"),
                                     3 * kPi / 4, kPi / 3, 5) <= 1e-8);
}

TEST_CASE("random spot checks keep the characteristic functions opposite") {
    std::mt19937 rng(20260815u);
    std::uniform_real_distribution<double> angle(0.15, kPi - 0.15);
    std::uniform_real_distribution<double> level(-5.0, 30.0);
    Potential pool[] = {Potential::zero(), Potential::constant(1.0),
                        Potential::expression("sin(x)"),
                        Potential::expression("0.3*x*(pi-x)")};
    for (int trial = 0; trial < 20; ++trial) {
        const auto& q = pool[trial % 4];
        double a = angle(rng), b = angle(rng), mu = level(rng);
        double phi = characteristic_phi(q, mu, a, b);
        double psi = characteristic_psi(q, mu, a, b);
        CAPTURE(trial);
        CHECK(std::abs(phi + psi) <= 1e-7 * (1.0 + std::abs(phi)));
    }
}

TEST_CASE("input validation for the eigenvalue search") {
    CHECK_THROWS_AS(find_eigenvalues(Potential::zero(), 0.0, kPi / 2, 3),
                    DomainError);
    CHECK_THROWS_AS(find_eigenvalues(Potential::zero(), kPi / 2, kPi, 3),
                    DomainError);
    CHECK_THROWS_AS(find_eigenvalues(Potential::zero(), kPi / 2, kPi / 2, 0),
                    DomainError);
}
