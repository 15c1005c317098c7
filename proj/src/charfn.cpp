#include "slnorm/charfn.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "slnorm/detail/drift.hpp"
#include "slnorm/errors.hpp"

namespace slnorm {
namespace {

constexpr double kPi = std::numbers::pi;

void validate_product_inputs(const SpectralData& spectral, int n, int K) {
    if (n < 0 || static_cast<std::size_t>(n) >= spectral.count())
        throw DomainError("product index n outside the computed spectrum");
    if (K < 1)
        throw DomainError("product truncation K must be positive");
    if (static_cast<std::size_t>(K) + 1 > spectral.count())
        throw DomainError("product truncation K needs K+1 computed eigenvalues");
    if (K < 2 * n)
        throw DomainError("product truncation K < 2n would cut the dominant factors");
}

struct FactoredProduct {
    double log_abs = 0.0;
    int sign = 1;
    double tail_factor = 1.0;
};

// prod_{k=1..K, k != n} (mu_k - mu_n)/k^2 in log space, with the tail beyond
// K estimated as prod_{k>K} (1 - (mu_n - delta)/k^2), d = mu_n - delta fixed
// at the fitted drift.  The tail's log is summed term by term while d/k^2 is
// non-negligible and closed analytically afterwards:
// sum_{k>m} log(1 - d/k^2) ~ -d T2(m) - d^2 T4(m)/2 with
// T2m(m) = zeta(2m) - sum_{k<=m} k^{-2m}; the switchover point is chosen so
// the neglected cubic term is far below the product's other error sources.
FactoredProduct factored_product(const SpectralData& spectral, int n, int K) {
    const auto& rec = spectral.records;
    const double mu_n = rec[n].mu;

    FactoredProduct out;
    for (int k = 1; k <= K; ++k) {
        if (k == n)
            continue;
        double factor = (rec[k].mu - mu_n) / (double(k) * k);
        if (factor < 0.0) {
            out.sign = -out.sign;
            factor = -factor;
        }
        out.log_abs += std::log(factor);
    }

    const double drift = detail::fit_tail_drift(rec, rec.size());
    const double d = mu_n - drift;
    // explicit factors until |d|/k^2 <= 1e-4 (K >= 2n keeps 1 - d/k^2 > 0
    // throughout: d < mu_n ~ n^2 while k > K >= 2n)
    const long switchover =
        std::max<long>(K, std::lround(std::ceil(100.0 * std::sqrt(std::abs(d)))));
    double log_tail = 0.0;
    for (long k = K + 1; k <= switchover; ++k)
        log_tail += std::log1p(-d / (double(k) * k));
    double t2 = kPi * kPi / 6, t4 = kPi * kPi * kPi * kPi / 90;
    for (long k = switchover; k >= 1; --k) { // descending: small terms first
        const double k2 = double(k) * double(k);
        t2 -= 1.0 / k2;
        t4 -= 1.0 / (k2 * k2);
    }
    out.tail_factor = std::exp(log_tail - d * t2 - 0.5 * d * d * t4);
    return out;
}

} // namespace

ProductReport product_phi_dot(const SpectralData& spectral, double alpha, double beta,
                              int n, int K) {
    BoundaryParams bp(alpha, beta);
    validate_product_inputs(spectral, n, K);

    const auto& rec = spectral.records;
    const auto product = factored_product(spectral, n, K);
    const double angles = std::sin(bp.alpha) * std::sin(bp.beta);
    double prefactor;
    if (n == 0)
        prefactor = -kPi * angles;
    else
        prefactor = -(kPi / (double(n) * n)) * (rec[0].mu - rec[n].mu) * angles;

    ProductReport report;
    report.n = n;
    report.K = K;
    report.tail_factor_estimate = product.tail_factor;
    report.product_value =
        prefactor * product.sign * std::exp(product.log_abs) * product.tail_factor;
    report.direct_value = rec[n].phi_dot;
    report.relative_error = std::abs(report.product_value - report.direct_value) /
                            std::abs(report.direct_value);
    return report;
}

double recover_b_tilde(const SpectralData& spectral, const NormingSet& norms, int n,
                       int K) {
    validate_product_inputs(spectral, n, K);
    if (static_cast<std::size_t>(n) >= norms.count())
        throw DomainError("recovery index n outside the norming data");

    const auto& rec = spectral.records;
    const auto product = factored_product(spectral, n, K);
    // squared product: sign drops, logs double
    const double product_sq = std::exp(2.0 * product.log_abs) * product.tail_factor *
                              product.tail_factor;
    if (n == 0)
        return norms.a_tilde[0] / (kPi * kPi * product_sq);
    const double n2 = double(n) * n;
    const double gap = rec[0].mu - rec[n].mu;
    return norms.a_tilde[n] * n2 * n2 / (kPi * kPi * gap * gap * product_sq);
}

SeriesReport verify_recovered_series(const SpectralData& spectral,
                                     const NormingSet& norms, double alpha,
                                     double beta, int N_terms, int K) {
    BoundaryParams bp(alpha, beta);
    if (N_terms < 1)
        throw DomainError("recovered series needs at least one term");
    if (static_cast<std::size_t>(N_terms) > norms.count())
        throw DomainError("recovered series needs norming data for every term");

    std::vector<double> recovered_b_tilde(N_terms);
    for (int n = 0; n < N_terms; ++n)
        recovered_b_tilde[n] = 1.0 / recover_b_tilde(spectral, norms, n, K);
    return extrapolate_gap_series(recovered_b_tilde,
                                  -std::cos(bp.beta) / std::sin(bp.beta));
}

} // namespace slnorm
