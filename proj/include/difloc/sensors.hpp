// Phase 1-2 simulation: mobile-sensor random walks with reflecting
// boundaries, activation on contact with the abnormality, and the release
// timing of the two sensor strategies.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "difloc/geometry.hpp"
#include "difloc/medium.hpp"

namespace difloc {

enum class Strategy { collaborative, noncollaborative };

struct SensorParams {
    int n_sensors = 20;              // N_s
    double diffusion = 1e-9;         // D_s
    double dt = 0.0;                 // walk time step; default slot/100
    double capture_radius = 0.0;     // default w/200
    double slot_duration = 0.0;      // T; default 2 * observation_time
    int quorum = 5;                  // N_th
    double timeout = 0.0;            // T_th; default 50 * T
    double molecules_per_type = 0.0; // M; default released_per_type / quorum

    void validate() const;
};

/// Fills the unspecified timing/geometry defaults from the arena and
/// diffusion parameters: D_s = D, T = 2 * T_obs, dt = T/100,
/// capture_radius = w/200, T_th = 50 * T, M = (N_th*M)/N_th.
SensorParams default_sensor_params(const Arena& arena, const DiffusionParams& params);

/// Outcome of a walk: when the quorum (or the timeout) triggered, the slot
/// boundary at which molecules go out, and how many sensors release.
struct ReleaseEvent {
    double release_time = 0.0;  // n * T, first slot boundary at/after trigger
    double trigger_time = 0.0;  // t_r (collaborative) or T_th (non-collaborative)
    long n_released = 0;
    Vec2 location;
};

struct WalkOptions {
    long max_slots = 100000;            // collaborative abort horizon
    bool condition_on_quorum = false;   // non-collaborative: resample until N_r == quorum
    int max_condition_attempts = 1000;
    // Test hook, called after every step with all current positions.
    std::function<void(long step, std::span<const Vec2>)> observer;
};

/// Mirrors a coordinate into [0, w] (triangular fold with period 2w).
double reflect_coordinate(double x, double w);

/// Runs independent Gaussian-increment random walks (per-axis step std
/// sqrt(2 * D_s * dt)) from the arena center until the strategy's release
/// condition fires. Collaborative: returns once `quorum` sensors have
/// activated; throws std::runtime_error if that does not happen within
/// max_slots. Non-collaborative: walks until `timeout`, releasing whatever
/// activated by then (optionally conditioned on exactly `quorum`).
ReleaseEvent walk_until_release(const SensorParams& params, const Arena& arena, Vec2 abnormality,
                                Strategy strategy, std::uint64_t seed,
                                const WalkOptions& options = {});

}  // namespace difloc
