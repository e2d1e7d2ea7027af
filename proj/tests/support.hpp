// Shared test oracles, independent of the library implementations they
// check: quadrature form of the Marcum Q-function, series oracles for the
// special functions, exact binomial tail tests for Monte Carlo validation,
// and empirical-CDF distance helpers.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "difloc/numerics.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Truncated power series for I_v(x); independent of the library path.
inline double bessel_i_series(double order, double x, int terms = 50) {
    double sum = 0.0;
    for (int m = 0; m < terms; ++m) {
        const double lt = (2.0 * m + order) * std::log(0.5 * x) - std::lgamma(m + 1.0) -
                          std::lgamma(m + order + 1.0);
        sum += std::exp(lt);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature.
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double eps,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::abs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps = 1e-12, int depth = 40) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, eps, depth);
}

// ---------------------------------------------------------------------------
// Marcum Q by its defining integral,
//   Q_M(a,b) = int_b^inf x (x/a)^(M-1) exp(-(x^2+a^2)/2) I_{M-1}(a x) dx,
// evaluated with the exponentially scaled Bessel so the Gaussian factor
// exp(-(x-a)^2/2) absorbs the growth of I_{M-1}(a x). Requires M >= 1.
inline double marcum_q_integral(double m, double a, double b) {
    if (!(m >= 1.0)) throw std::invalid_argument("marcum_q_integral: needs M >= 1");
    if (!(a > 0.0)) throw std::invalid_argument("marcum_q_integral: needs a > 0");
    auto integrand = [m, a](double x) {
        if (x <= 0.0) return 0.0;
        return x * std::pow(x / a, m - 1.0) * std::exp(-0.5 * (x - a) * (x - a)) *
               difloc::numerics::bessel_i_scaled(m - 1.0, a * x);
    };
    const double hi = std::max(a, b) + 45.0;
    if (b >= hi) return 0.0;
    return adaptive_simpson(integrand, b, hi, 1e-13);
}

// ---------------------------------------------------------------------------
// Standard normal tail by Maclaurin series of the CDF (|x| small enough for
// fast convergence; used to pin gaussian_q at interior points).
inline double gaussian_q_series(double x) {
    double term = x;
    double sum = x;
    const double x2 = x * x;
    for (int k = 1; k < 200; ++k) {
        term *= -x2 / (2.0 * k);
        const double add = term / (2.0 * k + 1.0);
        sum += add;
        if (std::abs(add) < 1e-18) break;
    }
    return 0.5 - sum / std::sqrt(2.0 * std::numbers::pi);
}

// ---------------------------------------------------------------------------
// Exact binomial tail probabilities P[X <= x] and P[X >= x] for X ~
// Binomial(n, p), by stable summation of the PMF outward from the mode.
inline double binom_pmf_log(long n, long k, double p) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
           k * std::log(p) + (n - k) * std::log1p(-p);
}

inline double binom_cdf(long n, long x, double p) {
    if (x < 0) return 0.0;
    if (x >= n) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    // Sum the smaller tail directly in log space.
    double sum = 0.0;
    const double mean = n * p;
    if (x <= mean) {
        for (long k = x; k >= 0; --k) {
            const double t = std::exp(binom_pmf_log(n, k, p));
            sum += t;
            if (t < sum * 1e-18 && k < mean - 10.0 * std::sqrt(mean)) break;
        }
        return std::min(1.0, sum);
    }
    for (long k = x + 1; k <= n; ++k) {
        const double t = std::exp(binom_pmf_log(n, k, p));
        sum += t;
        if (t < sum * 1e-18 && k > mean + 10.0 * std::sqrt(mean)) break;
    }
    return std::max(0.0, 1.0 - sum);
}

inline double binom_sf(long n, long x, double p) {  // P[X >= x]
    return 1.0 - binom_cdf(n, x - 1, p);
}

// Two-sided exact binomial consistency test: true iff `p` lies inside the
// Clopper-Pearson interval of confidence 1-alpha around x successes in n
// trials (by the tail-probability duality).
inline bool binomial_consistent(long n, long x, double p, double alpha) {
    if (p <= 0.0) return x == 0;
    if (p >= 1.0) return x == n;
    return binom_sf(n, x, p) >= alpha / 2.0 && binom_cdf(n, x, p) >= alpha / 2.0;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov distance between a sorted sample and a reference CDF,
// optionally restricted to an interval.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf,
                          double lo = -std::numeric_limits<double>::infinity(),
                          double hi = std::numeric_limits<double>::infinity()) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) {
        const double z = sample[i];
        if (z < lo || z > hi) continue;
        const double g = cdf(z);
        d = std::max(d, std::abs((i + 1) / n - g));
        d = std::max(d, std::abs(i / n - g));
    }
    return d;
}

// Dvoretzky-Kiefer-Wolfowitz bound: with probability >= 1 - delta the KS
// distance of an n-sample empirical CDF from the truth is below this.
inline double dkw_bound(size_t n, double delta) {
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

}  // namespace oracle
