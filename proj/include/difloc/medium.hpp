// Diffusion-channel physics shared by the sensor-to-FC link and the
// FC-to-gateway marker link: point-release hit probabilities for a
// transparent receiver, peak observation times, and mean received counts.
#pragma once

#include "difloc/geometry.hpp"

namespace difloc {

/// Physical parameters of the two diffusion links (Table-of-parameters
/// values are the defaults).
struct DiffusionParams {
    double diff_molecule = 1e-9;      // D, sensor molecules
    double diff_marker = 1e-10;       // D2, FC markers
    double volume_fc = 1.11e-7;       // V_F (2-D receiver cross-section)
    double volume_gateway = 1.78e-6;  // V_G
    int samples_per_fc = 2;           // K, molecule types
    double released_per_type = 1e6;   // N_th * M
    double amplification = 1e3;       // alpha

    void validate() const;
};

/// Probability that a molecule released at distance d is inside a
/// transparent receiver of the given volume after t_obs seconds:
///   V / (4 pi D' t)^(dims/2) * exp(-d^2 / (4 D' t)).
/// The point-concentration form can exceed 1 for tiny d and t; the result
/// is clipped to [0,1] and the clip is counted as a diagnostic.
/// Throws std::invalid_argument for non-positive t_obs.
double hit_probability(double distance, double t_obs, double volume, double diff_coeff, int dims);

/// Number of times hit_probability has been clipped to 1 so far.
long hit_probability_clip_count();
void reset_hit_probability_clip_count();

/// Time at which the concentration at distance d peaks: d^2 / (2 * dims * D').
/// Throws std::invalid_argument for d <= 0.
double peak_time(double distance, double diff_coeff, int dims);

/// The common FC sampling delay. The release point is unknown, so sampling
/// assumes a centrally located source, d = w*sqrt(2)/2, giving w^2/(4*dims*D).
double observation_time(const Arena& arena, const DiffusionParams& params);

/// Gateway sampling delay for the marker link, d_FG^2 / (2 * dims * D2).
double gateway_observation_time(const Arena& arena, const DiffusionParams& params);

/// Marker-link hit probability at the gateway sampling time.
double marker_hit_probability(const Arena& arena, const DiffusionParams& params);

/// Mean number of molecules of one type observed by an FC at distance d
/// when `released` molecules of that type are released:
///   released * hit_probability(d, w^2/(4*dims*D), V_F, D, dims).
double mean_count(double distance, const Arena& arena, const DiffusionParams& params,
                  double released);

/// Mean number of markers observed at the gateway given that the relaying
/// FC observed y molecules: alpha * y * marker_hit_probability.
double marker_mean_count(double y_observed, const Arena& arena, const DiffusionParams& params);

/// Closed-form mean-count model m(d) = min(cap, amplitude * exp(-d^2/(4 D T))).
///
/// One evaluation path shared by the deciders, the error analysis and the
/// simulator, so that exact-mean observations land exactly on the decision
/// means. `ideal` models the FC observation; `noisy` folds in the
/// amplify-and-forward factor alpha * mu_tilde so it models the expected
/// gateway count. `with_scale` pins the relay factor explicitly (used for
/// the exact-compensation limit alpha * mu_tilde = 1).
struct MeanCountModel {
    double amplitude = 0.0;
    double inv_4dt = 0.0;
    double cap = 0.0;

    double operator()(double d) const {
        double v = amplitude * std::exp(-inv_4dt * d * d);
        return v > cap ? cap : v;
    }

    static MeanCountModel ideal(const Arena& arena, const DiffusionParams& params,
                                double released);
    static MeanCountModel noisy(const Arena& arena, const DiffusionParams& params,
                                double released);
    static MeanCountModel with_scale(const Arena& arena, const DiffusionParams& params,
                                     double released, double relay_scale);
};

}  // namespace difloc
