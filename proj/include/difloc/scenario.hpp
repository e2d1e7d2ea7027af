// Experiment configuration: every knob of a run as a flat key = value file
// (SI base units, '#' comments), plus conversion to a simulator TrialPlan.
#pragma once

#include <iosfwd>
#include <string>

#include "difloc/sim.hpp"

namespace difloc {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct ScenarioConfig {
    Arena arena{};
    DiffusionParams diff{};
    Strategy strategy = Strategy::collaborative;
    Channel channel = Channel::ideal;
    int L = 3;
    long trials = 20000;
    std::uint64_t seed = 1;
    CountModel model = CountModel::auto_select;
    NoiseMode noise = NoiseMode::stochastic;
    AbnormalityPrior prior = AbnormalityPrior::indicator_points;
    bool use_sensor_walk = false;
    int threads = 0;

    void validate() const;
    TrialPlan to_plan() const;

    /// One-line descriptor used in reports.
    std::string descriptor() const;

    /// Serialization as the canonical key = value listing (sorted keys).
    std::string to_key_values() const;
};

/// Parses a key = value configuration. Unknown keys and malformed values
/// raise std::invalid_argument with the offending line.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_file(const std::string& path);

/// Applies a single key = value override (same keys as the config file).
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);

const char* to_string(Strategy s);
const char* to_string(Channel c);
const char* to_string(CountModel m);
const char* to_string(NoiseMode n);
const char* to_string(AbnormalityPrior p);

}  // namespace difloc
