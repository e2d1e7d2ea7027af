// Gateway decision rules. Collaborative/radial: per-FC sum-of-squares
// statistics against a ladder of pairwise-ML thresholds tau. Non-collaborative/
// grid: ratio statistics z12 = V1/V2 and z32 = V3/V2 against the LLR
// quadratic-root thresholds gamma. The noisy-channel variants reuse the same
// rules with the expected gateway-count model substituted for the FC model.
#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "difloc/clustering.hpp"

namespace difloc {

enum class CountSemantics { fc_molecules, gateway_markers };  // Y vs W samples

/// Per-FC vectors of K counts. Two FCs for the radial scheme, three for the
/// grid scheme; counts are stored as doubles so exact-mean (zero-noise)
/// observations can be represented.
struct ObservationSet {
    std::vector<std::vector<double>> counts;
    CountSemantics semantics = CountSemantics::fc_molecules;

    int fc_count() const { return static_cast<int>(counts.size()); }
};

/// Mean received count as a function of distance; strictly decreasing over
/// the operating range. Pass the ideal FC model m(d) or the expected
/// gateway model for the noisy channel.
using MeanFn = std::function<double(double)>;

/// Pairwise-ML sum-of-squares threshold between hypothesis radii r1 != r2:
///   tau = K m(r1) m(r2) (1 + ln(m(r1)/m(r2)) / (m(r1) - m(r2))).
/// Symmetric in its radius arguments. Throws std::invalid_argument on equal
/// radii (or equal mean values, which make the rule degenerate).
double tau_threshold(double r1, double r2, int k_samples, const MeanFn& mean_fn);

/// Adjacent-pair threshold ladder tau(r_j, r_{j+1}) for the scheme's radius
/// list; strictly decreasing when the mean function is strictly decreasing.
std::vector<double> tau_ladder(const RadialScheme& scheme, int k_samples, const MeanFn& mean_fn);

struct RadialDecision {
    RadialCluster cluster;             // final decision, a member of Psi
    RadialCluster raw;                 // per-FC ladder decision before the feasibility snap
    std::array<double, 2> sum_squares{};  // S_i per FC
    bool snapped = false;
};

/// Threshold-ladder decision: per FC, S_i = sum_k count^2 selects the radius
/// whose band (tau_j, tau_{j-1}) contains it, clamping to the end radii for
/// out-of-ladder statistics. A jointly infeasible pair is snapped to the
/// nearest member of Psi in (d1, d2), ties toward smaller radii.
RadialDecision decide_radial(const ObservationSet& obs, const RadialScheme& scheme, int k_samples,
                             const MeanFn& mean_fn);

/// Reference rule: per FC, minimizes K ln(m(r_j)) + sum_k (count - m(r_j))^2 / m(r_j)
/// over the radius list. Used to test that the ladder matches exact ML.
RadialDecision exact_ml_radial(const ObservationSet& obs, const RadialScheme& scheme,
                               int k_samples, const MeanFn& mean_fn);

/// MSE-minimizing estimate of the mean count from one FC's samples: the
/// sample average. Feeds the gamma thresholds at decision time only.
double estimate_mean(std::span<const double> counts);

/// Root of the LLR quadratic separating two adjacent ratio hypotheses
/// N(mu_lo, var_lo) vs N(mu_hi, var_hi); lies strictly between the means.
/// Degenerates to the linear threshold when the variances are equal. Throws
/// std::invalid_argument when no root separates the means.
double gamma_threshold(double mu_lo, double var_lo, double mu_hi, double var_hi);

/// Per-axis hypothesis means mu_{Z|i} = m(d_num@IP) / m(d2@IP), i = 1..L.
/// axis 0 uses FC1/FC2 (decides the x index), axis 1 uses FC3/FC2.
std::vector<double> grid_axis_means(const GridScheme& scheme, const MeanFn& mean_fn, int axis);

/// The L-1 ordered thresholds gamma(1) < ... < gamma(L-1) for one axis,
/// built from the axis means and a common mean-count scalar for FC2.
std::vector<double> gamma_ladder(std::span<const double> axis_means, int k_samples, double m_d2);

struct GridDecodeOptions {
    bool half_count_floor = true;     // raise each V_i to >= 0.5 before ratios
    bool fallback_on_degenerate = true;  // V2 <= 0: decide from V1, V3 magnitudes
};

struct GridDecision {
    GridCell cell;
    double z12 = 0.0;
    double z32 = 0.0;
    bool flagged = false;  // floor applied or degenerate fallback taken
};

/// Ratio-statistic decision: V_i = mean of FC_i's K counts, z12 = V1/V2 and
/// z32 = V3/V2 walk their gamma ladders (built with the estimated FC2 mean)
/// to pick (ix, iy). Statistics outside the ladder clamp to the end cells.
GridDecision decide_grid(const ObservationSet& obs, const GridScheme& scheme, int k_samples,
                         const MeanFn& mean_fn, const GridDecodeOptions& options = {});

}  // namespace difloc
