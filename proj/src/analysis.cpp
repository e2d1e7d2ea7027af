#include "difloc/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "difloc/numerics.hpp"

namespace difloc {

namespace {
// The P_e assembly subtracts sums of near-unit Marcum/Gaussian bands from 1.
// For large non-centrality (released counts ~1e8) the band evaluations carry
// ~1e-11 of accumulated roundoff, so assembled values below this floor are
// indistinguishable from zero and are reported as exactly zero. Keeps
// ordering comparisons on analytic values meaningful in the saturated regime.
constexpr double kAnalyticFloor = 1e-10;

double flush_floor(double pe) { return pe < kAnalyticFloor ? 0.0 : pe; }
}  // namespace

double proportion_ci95(double p_hat, long trials) {
    if (trials <= 0) return 0.0;
    return 1.96 * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

ErrorReport pe_radial(const RadialScheme& scheme, int k_samples, const MeanFn& mean_fn) {
    ErrorReport report;
    report.config = "radial L=" + std::to_string(scheme.L);
    if (scheme.psi.empty()) throw std::invalid_argument("pe_radial: empty Psi");

    if (scheme.np() == 1) {
        // One hypothesis: the decision always snaps to it.
        report.analytic_pe = 0.0;
        report.per_cluster_correct = {1.0};
        return report;
    }
    if (scheme.radii.size() < 2)
        throw std::invalid_argument("pe_radial: need at least two radii");

    const auto& radii = scheme.radii;
    const int n_radii = static_cast<int>(radii.size());
    std::vector<double> m(n_radii);
    for (int j = 0; j < n_radii; ++j) {
        m[j] = mean_fn(radii[j]);
        if (!(m[j] > 0.0)) throw std::invalid_argument("pe_radial: mean must be positive");
    }
    const auto ladder = tau_ladder(scheme, k_samples, mean_fn);

    // Correct-decision probability per radius index.
    std::vector<double> correct(n_radii);
    const double half_k = 0.5 * k_samples;
    for (int j = 0; j < n_radii; ++j) {
        const double a = std::sqrt(k_samples * m[j]);
        const double upper = (j == n_radii - 1)
                                 ? 1.0
                                 : numerics::marcum_q(half_k, a, std::sqrt(ladder[j] / m[j]));
        const double lower =
            (j == 0) ? 0.0 : numerics::marcum_q(half_k, a, std::sqrt(ladder[j - 1] / m[j]));
        correct[j] = upper - lower;
        if (correct[j] < 0.0) correct[j] = 0.0;
    }

    double total = 0.0;
    report.per_cluster_correct.reserve(scheme.psi.size());
    for (const RadialCluster& c : scheme.psi) {
        const double p = correct[c.j1] * correct[c.j2];
        report.per_cluster_correct.push_back(p);
        total += p;
    }
    report.analytic_pe = flush_floor(1.0 - total / scheme.np());
    return report;
}

ErrorReport pe_grid(const GridScheme& scheme, int k_samples, const MeanFn& mean_fn) {
    ErrorReport report;
    report.config = "grid L=" + std::to_string(scheme.L);
    const int L = scheme.L;
    if (L < 1) throw std::invalid_argument("pe_grid: L must be >= 1");
    if (L == 1) {
        report.analytic_pe = 0.0;
        report.per_cluster_correct = {1.0};
        return report;
    }

    const auto mu_x = grid_axis_means(scheme, mean_fn, 0);
    const auto mu_y = grid_axis_means(scheme, mean_fn, 1);

    auto band_probability = [&](const std::vector<double>& means,
                                const std::vector<double>& gammas, int idx, double m_d2) {
        const double mu = means[idx - 1];
        const double sd = std::sqrt(mu * (1.0 + mu) / (k_samples * m_d2));
        const double lo = (idx == 1) ? 0.0 : gammas[idx - 2];
        const double hi_q =
            (idx == L) ? 0.0 : numerics::gaussian_q((gammas[idx - 1] - mu) / sd);
        return numerics::gaussian_q((lo - mu) / sd) - hi_q;
    };

    double total = 0.0;
    report.per_cluster_correct.reserve(static_cast<size_t>(L) * L);
    for (int ix = 1; ix <= L; ++ix) {
        for (int iy = 1; iy <= L; ++iy) {
            const Vec2 p = scheme.ip({ix, iy});
            const double m_d2 = mean_fn(scheme.arena.fc_distance(2, p));
            if (!(m_d2 > 0.0)) throw std::invalid_argument("pe_grid: mean must be positive");
            if (std::sqrt(k_samples * m_d2) < 10.0) report.lemma2_warning = true;
            const auto gx = gamma_ladder(mu_x, k_samples, m_d2);
            const auto gy = gamma_ladder(mu_y, k_samples, m_d2);
            const double pc =
                band_probability(mu_x, gx, ix, m_d2) * band_probability(mu_y, gy, iy, m_d2);
            report.per_cluster_correct.push_back(pc);
            total += pc;
        }
    }
    report.analytic_pe = flush_floor(1.0 - total / (static_cast<double>(L) * L));
    return report;
}

ErrorReport pe_noisy(const RadialScheme& scheme, int k_samples, const MeanFn& noisy_mean_fn) {
    ErrorReport r = pe_radial(scheme, k_samples, noisy_mean_fn);
    r.config += " noisy";
    return r;
}

ErrorReport pe_noisy(const GridScheme& scheme, int k_samples, const MeanFn& noisy_mean_fn) {
    ErrorReport r = pe_grid(scheme, k_samples, noisy_mean_fn);
    r.config += " noisy";
    return r;
}

}  // namespace difloc
