#include "difloc/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace difloc::numerics {

namespace {

constexpr int kMaxSeriesIter = 2000000;
constexpr double kSeriesEps = 1e-17;

[[noreturn]] void domain_fail(const std::string& what) { throw std::domain_error(what); }

// Core power series for the scaled Bessel function:
//   exp(-x) * I_v(x) = exp(-x) * sum_m (x/2)^(v+2m) / (m! Gamma(v+m+1))
// All terms are positive, so no cancellation. The sum is anchored at its
// dominant index m ~ x/2 and expanded both ways; anchoring avoids the
// underflow of the m = 0 term for large x.
double bessel_i_series_scaled(double order, double x) {
    if (x == 0.0) return order == 0.0 ? 1.0 : 0.0;
    const double q = 0.25 * x * x;
    const long m0 = static_cast<long>(0.5 * x);
    const double anchor =
        std::exp((2.0 * m0 + order) * std::log(0.5 * x) - std::lgamma(m0 + 1.0) -
                 std::lgamma(m0 + order + 1.0) - x);
    double sum = anchor;
    double term = anchor;
    for (long m = m0;; ++m) {
        term *= q / ((m + 1.0) * (m + 1.0 + order));
        sum += term;
        if (term < sum * kSeriesEps) break;
        if (m - m0 > kMaxSeriesIter) domain_fail("bessel_i: series did not converge");
    }
    term = anchor;
    for (long m = m0; m >= 1; --m) {
        term *= m * (m + order) / q;
        sum += term;
        if (term < sum * kSeriesEps) break;
    }
    return sum;
}

// Regularized lower incomplete gamma by series, valid for x < s + 1.
double gamma_p_series(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    double sk = s;
    for (int k = 0; k < kMaxSeriesIter; ++k) {
        sk += 1.0;
        term *= x / sk;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kSeriesEps)
            return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    domain_fail("gamma_p: series did not converge");
}

// Regularized upper incomplete gamma by modified Lentz continued fraction,
// valid for x >= s + 1.
double gamma_q_cf(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxSeriesIter; ++i) {
        const double an = -static_cast<double>(i) * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kSeriesEps)
            return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    domain_fail("gamma_q: continued fraction did not converge");
}

}  // namespace

double bessel_i_scaled(double order, double x) {
    if (x < 0.0) domain_fail("bessel_i: x must be non-negative");
    if (order < 0.0) domain_fail("bessel_i: order must be non-negative");
    return bessel_i_series_scaled(order, x);
}

double bessel_i(double order, double x) {
    if (x < 0.0) domain_fail("bessel_i: x must be non-negative");
    if (order < 0.0) domain_fail("bessel_i: order must be non-negative");
    if (x == 0.0) return order == 0.0 ? 1.0 : 0.0;
    return std::exp(x) * bessel_i_series_scaled(order, x);
}

double gamma_p(double s, double x) {
    if (!(s > 0.0)) domain_fail("gamma_p: s must be positive");
    if (x < 0.0) domain_fail("gamma_p: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return gamma_p_series(s, x);
    return 1.0 - gamma_q_cf(s, x);
}

double gamma_q(double s, double x) {
    if (!(s > 0.0)) domain_fail("gamma_q: s must be positive");
    if (x < 0.0) domain_fail("gamma_q: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
    return gamma_q_cf(s, x);
}

double marcum_q(double m, double a, double b) {
    if (!(m >= 0.5)) domain_fail("marcum_q: order m must be >= 0.5");
    if (a < 0.0 || b < 0.0) domain_fail("marcum_q: a and b must be non-negative");
    if (std::isinf(b)) return 0.0;
    if (b == 0.0) return 1.0;

    const double y = 0.5 * b * b;
    if (a == 0.0) return gamma_q(m, y);

    // Q_m(a,b) = sum_n pois(n; lambda) * Q_gamma(m + n, y), lambda = a^2/2.
    // Anchor at the Poisson mode and expand in both directions; the
    // neglected Poisson mass bounds the truncation error because each
    // survival factor lies in [0,1].
    const double lambda = 0.5 * a * a;
    const long n0 = static_cast<long>(lambda);
    const double p0 =
        std::exp(n0 * std::log(lambda) - lambda - std::lgamma(static_cast<double>(n0) + 1.0));
    const double q0 = gamma_q(m + static_cast<double>(n0), y);
    // tau(s) = y^s exp(-y) / Gamma(s+1) with s = m + n; drives the
    // Q_gamma(s+1,y) = Q_gamma(s,y) + tau(s) recurrence in both directions.
    const double tau0 =
        std::exp((m + n0) * std::log(y) - y - std::lgamma(m + static_cast<double>(n0) + 1.0));

    constexpr double kTailEps = 1e-15;
    double sum = p0 * q0;
    double mass = p0;

    // Upward pass: n = n0+1, n0+2, ...
    {
        double p = p0, q = q0, tau = tau0;
        const double far_tail = lambda + 10.0 * std::sqrt(lambda) + 10.0;
        for (long n = n0 + 1; mass < 1.0 - kTailEps; ++n) {
            p *= lambda / static_cast<double>(n);
            q += tau;
            tau *= y / (m + static_cast<double>(n));
            sum += p * q;
            mass += p;
            if (n - n0 > kMaxSeriesIter) domain_fail("marcum_q: upward pass did not converge");
            if (p < 1e-18 && static_cast<double>(n) > far_tail) break;
        }
    }
    // Downward pass: n = n0-1, ..., 0.
    {
        double p = p0, q = q0, tau = tau0;
        for (long n = n0; n >= 1 && mass < 1.0 - kTailEps; --n) {
            p *= static_cast<double>(n) / lambda;
            tau *= (m + static_cast<double>(n)) / y;  // tau(s-1) = tau(s) * s / y
            q -= tau;
            if (q < 0.0) q = 0.0;  // guard against roundoff below zero
            sum += p * q;
            mass += p;
        }
    }

    if (sum < 0.0) return 0.0;
    if (sum > 1.0) return 1.0;
    return sum;
}

double noncentral_chi2_cdf(int k, double lambda, double x) {
    if (k < 1) domain_fail("noncentral_chi2_cdf: dof must be >= 1");
    if (lambda < 0.0) domain_fail("noncentral_chi2_cdf: lambda must be non-negative");
    if (x < 0.0) domain_fail("noncentral_chi2_cdf: x must be non-negative");
    return 1.0 - marcum_q(0.5 * k, std::sqrt(lambda), std::sqrt(x));
}

double gaussian_q(double x) { return 0.5 * std::erfc(x * (1.0 / std::sqrt(2.0))); }

RatioGaussApprox ratio_gaussian_approx(double mu1, double sigma1, double mu2, double sigma2,
                                       double lambda) {
    if (!(mu2 > 0.0)) domain_fail("ratio_gaussian_approx: mu2 must be positive");
    if (!(mu1 > 0.0)) domain_fail("ratio_gaussian_approx: mu1 must be positive");

    RatioGaussApprox out;
    out.mean_z = mu1 / mu2;
    const double cv1 = sigma1 / mu1;
    const double cv2 = sigma2 / mu2;
    out.sigma_z = out.mean_z * std::sqrt(cv1 * cv1 + cv2 * cv2);

    out.valid = lambda > 0.0 && lambda <= 1.0 && cv1 > 0.0 && cv1 < lambda && cv2 > 0.0 &&
                cv2 * cv2 <= lambda * lambda - cv1 * cv1;
    return out;
}

}  // namespace difloc::numerics
