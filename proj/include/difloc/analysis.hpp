// Closed-form localization error probabilities for the four configurations
// (collaborative/non-collaborative x ideal/noisy channel), plus the report
// structure shared with the Monte Carlo engine.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "difloc/detection.hpp"

namespace difloc {

/// Analytic and/or empirical localization error probabilities. The analysis
/// functions fill the analytic side; the simulator fills the empirical side;
/// experiment runners merge the two.
struct ErrorReport {
    std::string config;

    std::optional<double> analytic_pe;
    std::vector<double> per_cluster_correct;  // analytic correct-decision prob per hypothesis
    bool lemma2_warning = false;  // some hypothesis violated sqrt(K m(d2)) >= 10

    std::optional<double> empirical_pe;
    double ci95_halfwidth = 0.0;  // 1.96 * sqrt(p(1-p)/trials)
    long trials = 0;
    long errors = 0;
    // Radial only: error rate of the per-FC ladder decisions before the
    // feasibility snap; this is the quantity the analytic formula models.
    std::optional<double> empirical_pe_presnap;
    long flagged_trials = 0;
    long snapped_trials = 0;
    std::vector<long> confusion;  // optional, row-major true x decided
    int confusion_dim = 0;
};

/// Collaborative/radial analytic error probability. Per radius x, the
/// correct-decision probability is the Marcum-Q band
///   Q_{K/2}(sqrt(K m(x)), sqrt(tau_below / m(x))) -
///   Q_{K/2}(sqrt(K m(x)), sqrt(tau_above / m(x)))
/// with the end-of-ladder terms replaced by 1 and 0, and the total assembled
/// with the uniform 1/N_p prior over Psi. Throws when fewer than two radii.
ErrorReport pe_radial(const RadialScheme& scheme, int k_samples, const MeanFn& mean_fn);

/// Non-collaborative/grid analytic error probability:
///   P_e = 1 - (1/L^2) sum_{ix,iy} P[gamma(ix-1) < z12 < gamma(ix)] *
///                                 P[gamma(iy-1) < z32 < gamma(iy)]
/// with gamma(0) = 0, gamma(L) = infinity, and the true m(d2) of each
/// hypothesis as the variance scalar. A hypothesis with sqrt(K m(d2)) < 10
/// only sets the report's warning flag.
ErrorReport pe_grid(const GridScheme& scheme, int k_samples, const MeanFn& mean_fn);

/// Noisy-channel variants: identical structure with the expected gateway
/// count model (alpha * m(d) * mu_tilde) supplied as mean_fn.
ErrorReport pe_noisy(const RadialScheme& scheme, int k_samples, const MeanFn& noisy_mean_fn);
ErrorReport pe_noisy(const GridScheme& scheme, int k_samples, const MeanFn& noisy_mean_fn);

/// 95% normal-approximation confidence half-width for a proportion.
double proportion_ci95(double p_hat, long trials);

}  // namespace difloc
