#include "difloc/sensors.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace difloc {

void SensorParams::validate() const {
    if (n_sensors < 1) throw std::invalid_argument("SensorParams: need at least one sensor");
    if (!(diffusion > 0.0)) throw std::invalid_argument("SensorParams: diffusion must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("SensorParams: dt must be positive");
    if (!(capture_radius > 0.0))
        throw std::invalid_argument("SensorParams: capture radius must be positive");
    if (!(slot_duration > 0.0))
        throw std::invalid_argument("SensorParams: slot duration must be positive");
    if (quorum < 1 || quorum > n_sensors)
        throw std::invalid_argument("SensorParams: quorum must be in [1, n_sensors]");
    if (!(timeout > 0.0)) throw std::invalid_argument("SensorParams: timeout must be positive");
    const double steps = timeout / dt;
    if (std::abs(steps - std::round(steps)) > 1e-6)
        throw std::invalid_argument("SensorParams: timeout must be a multiple of dt");
    if (!(molecules_per_type > 0.0))
        throw std::invalid_argument("SensorParams: molecules per type must be positive");
}

SensorParams default_sensor_params(const Arena& arena, const DiffusionParams& params) {
    SensorParams s;
    s.diffusion = params.diff_molecule;
    s.slot_duration = 2.0 * observation_time(arena, params);
    s.dt = s.slot_duration / 100.0;
    s.capture_radius = arena.side / 200.0;
    s.timeout = 50.0 * s.slot_duration;
    s.molecules_per_type = params.released_per_type / s.quorum;
    return s;
}

double reflect_coordinate(double x, double w) {
    const double period = 2.0 * w;
    double r = std::fmod(x, period);
    if (r < 0.0) r += period;
    return r <= w ? r : period - r;
}

namespace {

// Next slot boundary after the trigger: n*T with (n-1)T < t <= nT, and the
// first slot for a trigger at t = 0.
double next_slot_boundary(double t, double slot) {
    const double n = std::ceil(t / slot);
    return n < 1.0 ? slot : n * slot;
}

struct WalkResult {
    long activated = 0;
    double trigger_time = 0.0;  // time the quorum was reached (collaborative)
    bool quorum_reached = false;
};

WalkResult run_walk(const SensorParams& params, const Arena& arena, Vec2 abnormality,
                    bool stop_at_quorum, double stop_time, std::mt19937_64& rng,
                    const WalkOptions& options) {
    const double w = arena.side;
    const double step_std = std::sqrt(2.0 * params.diffusion * params.dt);
    std::normal_distribution<double> gauss(0.0, step_std);

    std::vector<Vec2> pos(params.n_sensors, arena.center());
    std::vector<bool> active(params.n_sensors, false);

    WalkResult result;
    auto try_capture = [&](int i) {
        if (!active[i] && distance(pos[i], abnormality) <= params.capture_radius) {
            active[i] = true;
            ++result.activated;
        }
    };
    for (int i = 0; i < params.n_sensors; ++i) try_capture(i);
    if (options.observer) options.observer(0, pos);
    if (stop_at_quorum && result.activated >= params.quorum) {
        result.quorum_reached = true;
        result.trigger_time = 0.0;
        return result;
    }

    const long max_steps = stop_at_quorum
                               ? static_cast<long>(options.max_slots *
                                                   std::ceil(params.slot_duration / params.dt))
                               : std::lround(stop_time / params.dt);
    for (long step = 1; step <= max_steps; ++step) {
        for (int i = 0; i < params.n_sensors; ++i) {
            if (active[i]) continue;
            pos[i].x = reflect_coordinate(pos[i].x + gauss(rng), w);
            pos[i].y = reflect_coordinate(pos[i].y + gauss(rng), w);
            try_capture(i);
        }
        if (options.observer) options.observer(step, pos);
        if (stop_at_quorum && result.activated >= params.quorum) {
            result.quorum_reached = true;
            result.trigger_time = step * params.dt;
            return result;
        }
    }
    result.trigger_time = stop_time;
    return result;
}

}  // namespace

ReleaseEvent walk_until_release(const SensorParams& params, const Arena& arena, Vec2 abnormality,
                                Strategy strategy, std::uint64_t seed,
                                const WalkOptions& options) {
    params.validate();
    arena.validate();
    if (!arena.contains(abnormality))
        throw std::invalid_argument("walk_until_release: abnormality outside the observing area");

    std::mt19937_64 rng(seed);

    if (strategy == Strategy::collaborative) {
        WalkResult r = run_walk(params, arena, abnormality, true, 0.0, rng, options);
        if (!r.quorum_reached)
            throw std::runtime_error("walk_until_release: quorum not reached within max_slots");
        ReleaseEvent ev;
        ev.trigger_time = r.trigger_time;
        ev.release_time = next_slot_boundary(r.trigger_time, params.slot_duration);
        ev.n_released = params.quorum;
        ev.location = abnormality;
        return ev;
    }

    const int attempts = options.condition_on_quorum ? options.max_condition_attempts : 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        WalkResult r = run_walk(params, arena, abnormality, false, params.timeout, rng, options);
        if (options.condition_on_quorum && r.activated != params.quorum) continue;
        ReleaseEvent ev;
        ev.trigger_time = params.timeout;
        ev.release_time = next_slot_boundary(params.timeout, params.slot_duration);
        ev.n_released = r.activated;
        ev.location = abnormality;
        return ev;
    }
    throw std::runtime_error(
        "walk_until_release: conditioning on quorum failed within max_condition_attempts");
}

}  // namespace difloc
