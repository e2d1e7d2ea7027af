// Special functions and distribution approximations backing the decision
// rules and the closed-form error probabilities: modified Bessel I, the
// Marcum Q-function, the non-central chi-squared CDF, the standard normal
// tail, and the normal approximation for a ratio of two Gaussians.
//
// Everything here is a pure function of its arguments and safe for
// unrestricted concurrent use.
#pragma once

namespace difloc::numerics {

/// Modified Bessel function of the first kind, I_order(x).
///
/// Supports real non-negative orders (half-integer orders arise from
/// Q_{K/2} with odd K). Power-series evaluation; relative error below
/// 1e-10 on x in [0, 700]. Throws std::domain_error for negative x or
/// negative order.
double bessel_i(double order, double x);

/// Exponentially scaled variant, exp(-x) * I_order(x). Never overflows;
/// intended for integrands that pair I_order(ax) with a Gaussian factor.
double bessel_i_scaled(double order, double x);

/// Regularized lower incomplete gamma P(s,x) = gamma(s,x)/Gamma(s).
double gamma_p(double s, double x);

/// Regularized upper incomplete gamma Q(s,x) = Gamma(s,x)/Gamma(s).
double gamma_q(double s, double x);

/// Marcum Q-function Q_m(a,b), the tail probability of a non-central chi
/// distribution with 2m degrees of freedom and non-centrality a^2.
///
/// Evaluated as a Poisson mixture of central chi-squared survival
/// functions, summed outward from the dominant Poisson index so that the
/// truncated mass bounds the error below 1e-12. Requires m >= 0.5 and
/// a, b >= 0; absolute error <= 1e-8 over the operating range.
double marcum_q(double m, double a, double b);

/// CDF of the non-central chi-squared distribution with k degrees of
/// freedom and non-centrality lambda: P[Z < x] = 1 - Q_{k/2}(sqrt(lambda), sqrt(x)).
double noncentral_chi2_cdf(int k, double lambda, double x);

/// Standard normal tail probability Q(x) = P[N(0,1) > x].
double gaussian_q(double x);

/// Normal approximation for Z = V1/V2 with V_i ~ N(mu_i, sigma_i^2).
///
/// mean_z = mu1/mu2 and sigma_z = mean_z * sqrt((sigma1/mu1)^2 +
/// (sigma2/mu2)^2). `valid` records whether the coefficient-of-variation
/// preconditions hold for the configured lambda; the approximation is
/// guaranteed only on [mean_z - sigma_z/lambda, mean_z + sigma_z/lambda],
/// and any use outside that interval is an approximation, not a guarantee.
struct RatioGaussApprox {
    double mean_z = 0.0;
    double sigma_z = 0.0;
    bool valid = false;
};

/// Builds the ratio-of-Gaussians approximation. lambda defaults to 1 (the
/// weakest precondition). Throws std::domain_error when mu1 or mu2 is not
/// strictly positive.
RatioGaussApprox ratio_gaussian_approx(double mu1, double sigma1, double mu2, double sigma2,
                                       double lambda = 1.0);

}  // namespace difloc::numerics
