#include "difloc/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace difloc {

namespace {

void check_radial_obs(const ObservationSet& obs, int k_samples) {
    if (obs.fc_count() != 2)
        throw std::invalid_argument("radial decision: expected observations from exactly 2 FCs");
    for (const auto& v : obs.counts)
        if (static_cast<int>(v.size()) != k_samples)
            throw std::invalid_argument("radial decision: observation vector length != K");
}

double sum_squares(std::span<const double> counts) {
    double s = 0.0;
    for (double c : counts) s += c * c;
    return s;
}

// Snap an infeasible (j1, j2) pair to the nearest Psi member in (d1, d2)
// Euclidean distance. Psi is sorted ascending, so the first minimizer found
// is the tie-break toward smaller radii.
RadialCluster snap_to_psi(const RadialScheme& scheme, RadialCluster raw) {
    const double r1 = scheme.radii.at(raw.j1);
    const double r2 = scheme.radii.at(raw.j2);
    double best = std::numeric_limits<double>::infinity();
    RadialCluster best_cell = scheme.psi.front();
    for (const RadialCluster& c : scheme.psi) {
        const double a = scheme.radii[c.j1] - r1;
        const double b = scheme.radii[c.j2] - r2;
        const double d = a * a + b * b;
        if (d < best) {
            best = d;
            best_cell = c;
        }
    }
    return best_cell;
}

}  // namespace

double tau_threshold(double r1, double r2, int k_samples, const MeanFn& mean_fn) {
    if (r1 == r2) throw std::invalid_argument("tau_threshold: radii must differ");
    if (k_samples < 1) throw std::invalid_argument("tau_threshold: K must be >= 1");
    const double m1 = mean_fn(r1);
    const double m2 = mean_fn(r2);
    if (!(m1 > 0.0) || !(m2 > 0.0))
        throw std::invalid_argument("tau_threshold: mean function must be positive");
    if (m1 == m2) throw std::invalid_argument("tau_threshold: degenerate equal means");
    return k_samples * m1 * m2 * (1.0 + std::log(m1 / m2) / (m1 - m2));
}

std::vector<double> tau_ladder(const RadialScheme& scheme, int k_samples, const MeanFn& mean_fn) {
    const auto& r = scheme.radii;
    if (r.size() < 2) throw std::invalid_argument("tau_ladder: need at least 2 radii");
    std::vector<double> ladder(r.size() - 1);
    for (size_t j = 0; j + 1 < r.size(); ++j)
        ladder[j] = tau_threshold(r[j], r[j + 1], k_samples, mean_fn);
    return ladder;
}

namespace {

int ladder_decide(double s, std::span<const double> ladder) {
    // Bands are (tau_j, tau_{j-1}) with tau decreasing; statistics above the
    // whole ladder take the smallest radius, below it the largest.
    int j = 0;
    const int n = static_cast<int>(ladder.size());
    while (j < n && s <= ladder[j]) ++j;
    return j;
}

RadialDecision finish_radial(const RadialScheme& scheme, RadialCluster raw,
                             std::array<double, 2> stats) {
    RadialDecision d;
    d.raw = raw;
    d.sum_squares = stats;
    if (auto idx = scheme.psi_index(raw); idx.has_value()) {
        d.cluster = raw;
    } else {
        d.cluster = snap_to_psi(scheme, raw);
        d.snapped = true;
    }
    return d;
}

}  // namespace

RadialDecision decide_radial(const ObservationSet& obs, const RadialScheme& scheme, int k_samples,
                             const MeanFn& mean_fn) {
    check_radial_obs(obs, k_samples);
    if (scheme.psi.empty()) throw std::invalid_argument("decide_radial: empty Psi");
    const auto ladder = tau_ladder(scheme, k_samples, mean_fn);

    std::array<double, 2> stats{sum_squares(obs.counts[0]), sum_squares(obs.counts[1])};
    RadialCluster raw{ladder_decide(stats[0], ladder), ladder_decide(stats[1], ladder)};
    return finish_radial(scheme, raw, stats);
}

RadialDecision exact_ml_radial(const ObservationSet& obs, const RadialScheme& scheme,
                               int k_samples, const MeanFn& mean_fn) {
    check_radial_obs(obs, k_samples);
    if (scheme.psi.empty()) throw std::invalid_argument("exact_ml_radial: empty Psi");
    if (scheme.radii.empty()) throw std::invalid_argument("exact_ml_radial: no radii");

    std::array<double, 2> stats{};
    RadialCluster raw;
    for (int i = 0; i < 2; ++i) {
        stats[i] = sum_squares(obs.counts[i]);
        double best = std::numeric_limits<double>::infinity();
        int best_j = 0;
        for (size_t j = 0; j < scheme.radii.size(); ++j) {
            const double m = mean_fn(scheme.radii[j]);
            double quad = 0.0;
            for (double c : obs.counts[i]) quad += (c - m) * (c - m);
            const double objective = k_samples * std::log(m) + quad / m;
            if (objective < best) {
                best = objective;
                best_j = static_cast<int>(j);
            }
        }
        (i == 0 ? raw.j1 : raw.j2) = best_j;
    }
    return finish_radial(scheme, raw, stats);
}

double estimate_mean(std::span<const double> counts) {
    if (counts.empty()) throw std::invalid_argument("estimate_mean: empty sample");
    double s = 0.0;
    for (double c : counts) s += c;
    return s / static_cast<double>(counts.size());
}

double gamma_threshold(double mu_lo, double var_lo, double mu_hi, double var_hi) {
    if (!(var_lo > 0.0) || !(var_hi > 0.0))
        throw std::invalid_argument("gamma_threshold: variances must be positive");
    if (mu_lo == mu_hi) throw std::invalid_argument("gamma_threshold: means must differ");

    const double a = 0.5 * (1.0 / var_hi - 1.0 / var_lo);
    const double b = mu_lo / var_lo - mu_hi / var_hi;
    const double c =
        0.5 * (std::log(var_hi / var_lo) + mu_hi * mu_hi / var_hi - mu_lo * mu_lo / var_lo);

    const double lo = std::min(mu_lo, mu_hi);
    const double hi = std::max(mu_lo, mu_hi);

    double root;
    if (a == 0.0) {
        // Equal variances: the LLR is linear and the rule is z = -c/b.
        root = -c / b;
        if (!(root > lo && root < hi))
            throw std::invalid_argument("gamma_threshold: linear threshold outside mean interval");
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0)
            throw std::invalid_argument("gamma_threshold: no real root between the means");
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
        const double r1 = q / a;
        const double r2 = (q != 0.0) ? c / q : -b / a - r1;
        const bool ok1 = r1 > lo && r1 < hi;
        const bool ok2 = r2 > lo && r2 < hi;
        if (!ok1 && !ok2)
            throw std::invalid_argument("gamma_threshold: no root between the means");
        root = ok1 ? r1 : r2;
        // One Newton polish pass keeps the defining LLR residual tight even
        // when the coefficients are large.
        const double deriv = 2.0 * a * root + b;
        if (deriv != 0.0) {
            const double polished = root - (a * root * root + b * root + c) / deriv;
            if (polished > lo && polished < hi) root = polished;
        }
    }
    return root;
}

std::vector<double> grid_axis_means(const GridScheme& scheme, const MeanFn& mean_fn, int axis) {
    if (axis != 0 && axis != 1) throw std::invalid_argument("grid_axis_means: axis must be 0 or 1");
    std::vector<double> means(scheme.L);
    const int fc_num = axis == 0 ? 1 : 3;
    for (int i = 1; i <= scheme.L; ++i) {
        const GridCell cell = axis == 0 ? GridCell{i, 1} : GridCell{1, i};
        const Vec2 p = scheme.ip(cell);
        const double num = mean_fn(scheme.arena.fc_distance(fc_num, p));
        const double den = mean_fn(scheme.arena.fc_distance(2, p));
        means[i - 1] = num / den;
    }
    return means;
}

std::vector<double> gamma_ladder(std::span<const double> axis_means, int k_samples, double m_d2) {
    if (axis_means.size() < 2) return {};
    if (!(m_d2 > 0.0)) throw std::invalid_argument("gamma_ladder: mean-count scalar must be > 0");
    auto variance = [&](double mu) { return mu * (1.0 + mu) / (k_samples * m_d2); };
    std::vector<double> gammas(axis_means.size() - 1);
    for (size_t i = 0; i + 1 < axis_means.size(); ++i)
        gammas[i] = gamma_threshold(axis_means[i], variance(axis_means[i]), axis_means[i + 1],
                                    variance(axis_means[i + 1]));
    return gammas;
}

namespace {

int gamma_decide(double z, std::span<const double> gammas) {
    int i = 1;
    for (double g : gammas) {
        if (z >= g)
            ++i;
        else
            break;
    }
    return i;
}

GridCell magnitude_fallback(const ObservationSet& obs, const GridScheme& scheme,
                            const MeanFn& mean_fn, double v1, double v3) {
    double best = std::numeric_limits<double>::infinity();
    GridCell best_cell{1, 1};
    for (int ix = 1; ix <= scheme.L; ++ix) {
        for (int iy = 1; iy <= scheme.L; ++iy) {
            const Vec2 p = scheme.ip({ix, iy});
            const double e1 = v1 - mean_fn(scheme.arena.fc_distance(1, p));
            const double e3 = v3 - mean_fn(scheme.arena.fc_distance(3, p));
            const double d = e1 * e1 + e3 * e3;
            if (d < best) {
                best = d;
                best_cell = {ix, iy};
            }
        }
    }
    (void)obs;
    return best_cell;
}

}  // namespace

GridDecision decide_grid(const ObservationSet& obs, const GridScheme& scheme, int k_samples,
                         const MeanFn& mean_fn, const GridDecodeOptions& options) {
    if (obs.fc_count() != 3)
        throw std::invalid_argument("decide_grid: expected observations from exactly 3 FCs");
    for (const auto& v : obs.counts)
        if (static_cast<int>(v.size()) != k_samples)
            throw std::invalid_argument("decide_grid: observation vector length != K");

    GridDecision d;
    double v1 = estimate_mean(obs.counts[0]);
    double v2 = estimate_mean(obs.counts[1]);
    double v3 = estimate_mean(obs.counts[2]);
    if (options.half_count_floor) {
        if (v1 < 0.5 || v2 < 0.5 || v3 < 0.5) d.flagged = true;
        v1 = std::max(v1, 0.5);
        v2 = std::max(v2, 0.5);
        v3 = std::max(v3, 0.5);
    }
    if (!(v2 > 0.0)) {
        if (!options.fallback_on_degenerate)
            throw std::invalid_argument("decide_grid: degenerate FC2 average");
        d.flagged = true;
        d.cell = magnitude_fallback(obs, scheme, mean_fn, v1, v3);
        return d;
    }

    d.z12 = v1 / v2;
    d.z32 = v3 / v2;

    try {
        const auto mu_x = grid_axis_means(scheme, mean_fn, 0);
        const auto mu_y = grid_axis_means(scheme, mean_fn, 1);
        const auto gx = gamma_ladder(mu_x, k_samples, v2);
        const auto gy = gamma_ladder(mu_y, k_samples, v2);
        d.cell = {gamma_decide(d.z12, gx), gamma_decide(d.z32, gy)};
    } catch (const std::invalid_argument&) {
        // An FC2 estimate small enough to break the threshold construction
        // is as degenerate as V2 <= 0; same fallback, same flag.
        if (!options.fallback_on_degenerate) throw;
        d.flagged = true;
        d.cell = magnitude_fallback(obs, scheme, mean_fn, v1, v3);
    }
    return d;
}

}  // namespace difloc
