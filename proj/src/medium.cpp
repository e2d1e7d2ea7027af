#include "difloc/medium.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace difloc {

namespace {
std::atomic<long> g_clip_count{0};
}

void DiffusionParams::validate() const {
    if (!(diff_molecule > 0.0) || !(diff_marker > 0.0))
        throw std::invalid_argument("DiffusionParams: diffusion coefficients must be positive");
    if (!(volume_fc > 0.0) || !(volume_gateway > 0.0))
        throw std::invalid_argument("DiffusionParams: receiver volumes must be positive");
    if (samples_per_fc < 1)
        throw std::invalid_argument("DiffusionParams: samples per FC (K) must be >= 1");
    if (!(released_per_type > 0.0))
        throw std::invalid_argument("DiffusionParams: released molecule count must be positive");
    if (!(amplification >= 1.0))
        throw std::invalid_argument("DiffusionParams: amplification must be >= 1");
}

double hit_probability(double distance, double t_obs, double volume, double diff_coeff,
                       int dims) {
    if (!(t_obs > 0.0)) throw std::invalid_argument("hit_probability: t_obs must be positive");
    if (distance < 0.0) throw std::invalid_argument("hit_probability: distance must be >= 0");
    if (!(volume > 0.0) || !(diff_coeff > 0.0) || dims < 1)
        throw std::invalid_argument("hit_probability: bad volume/diffusion/dims");

    const double denom = std::pow(4.0 * std::numbers::pi * diff_coeff * t_obs, 0.5 * dims);
    const double p = volume / denom * std::exp(-distance * distance / (4.0 * diff_coeff * t_obs));
    if (p > 1.0) {
        if (g_clip_count.fetch_add(1) == 0)
            std::fprintf(stderr,
                         "difloc: hit_probability clipped to 1 (point-concentration form "
                         "outside its validity range)\n");
        return 1.0;
    }
    return p;
}

long hit_probability_clip_count() { return g_clip_count.load(); }
void reset_hit_probability_clip_count() { g_clip_count.store(0); }

double peak_time(double distance, double diff_coeff, int dims) {
    if (!(distance > 0.0)) throw std::invalid_argument("peak_time: distance must be positive");
    if (!(diff_coeff > 0.0) || dims < 1)
        throw std::invalid_argument("peak_time: bad diffusion coefficient or dims");
    return distance * distance / (2.0 * dims * diff_coeff);
}

double observation_time(const Arena& arena, const DiffusionParams& params) {
    return arena.side * arena.side / (4.0 * Arena::dims * params.diff_molecule);
}

double gateway_observation_time(const Arena& arena, const DiffusionParams& params) {
    return peak_time(arena.gateway_distance, params.diff_marker, Arena::dims);
}

double marker_hit_probability(const Arena& arena, const DiffusionParams& params) {
    return hit_probability(arena.gateway_distance, gateway_observation_time(arena, params),
                           params.volume_gateway, params.diff_marker, Arena::dims);
}

double mean_count(double distance, const Arena& arena, const DiffusionParams& params,
                  double released) {
    if (released < 0.0) throw std::invalid_argument("mean_count: released must be >= 0");
    if (released == 0.0) return 0.0;
    return released * hit_probability(distance, observation_time(arena, params), params.volume_fc,
                                      params.diff_molecule, Arena::dims);
}

double marker_mean_count(double y_observed, const Arena& arena, const DiffusionParams& params) {
    if (y_observed < 0.0) throw std::invalid_argument("marker_mean_count: y must be >= 0");
    return params.amplification * y_observed * marker_hit_probability(arena, params);
}

MeanCountModel MeanCountModel::with_scale(const Arena& arena, const DiffusionParams& params,
                                          double released, double relay_scale) {
    const double t = observation_time(arena, params);
    MeanCountModel m;
    m.inv_4dt = 1.0 / (4.0 * params.diff_molecule * t);
    const double mu0 = params.volume_fc / (4.0 * std::numbers::pi * params.diff_molecule * t);
    m.amplitude = relay_scale * released * mu0;
    m.cap = relay_scale * released;
    return m;
}

MeanCountModel MeanCountModel::ideal(const Arena& arena, const DiffusionParams& params,
                                     double released) {
    return with_scale(arena, params, released, 1.0);
}

MeanCountModel MeanCountModel::noisy(const Arena& arena, const DiffusionParams& params,
                                     double released) {
    return with_scale(arena, params, released,
                      params.amplification * marker_hit_probability(arena, params));
}

}  // namespace difloc
