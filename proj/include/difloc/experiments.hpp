// Experiment runner: named preset sweeps and config-driven custom runs,
// with CSV emission and a reproducibility manifest per run.
#pragma once

#include <string>
#include <vector>

#include "difloc/scenario.hpp"

namespace difloc {

/// One sweep point: the resolved configuration plus its analytic and
/// empirical error probabilities.
struct ExperimentRow {
    std::string preset;
    ScenarioConfig cfg;
    ErrorReport report;  // analytic + empirical merged
};

/// Column order of the results CSV (fixed; header always emitted).
std::string results_csv_header();
std::string results_csv_row(const ExperimentRow& row);

/// Runs one configuration: analytic P_e for its scheme/channel plus the
/// Monte Carlo empirical P_e, merged into a single report.
ErrorReport evaluate_scenario(const ScenarioConfig& cfg);

struct RunResult {
    std::vector<std::string> files_written;
};

/// Executes a preset ("fig3", "fig4", "fig5", "fig6", "custom") into the
/// output directory. `base` supplies the starting configuration (Table
/// defaults plus any CLI overrides); sweeps override the swept variables.
/// Writes <preset>.csv (plus fig6's moments file) and <preset>.manifest.txt.
/// Files are written atomically and removed on failure. Throws
/// std::invalid_argument for unknown presets.
RunResult run_preset(const std::string& preset, const ScenarioConfig& base,
                     const std::string& out_dir);

}  // namespace difloc
