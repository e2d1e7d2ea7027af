// Monte Carlo engine: samples observations under the stochastic channel
// model (binomial or Gaussian-approximate; ideal or genuinely doubly
// stochastic), runs the decision rules, and aggregates empirical error
// rates, confusion matrices and count histograms.
//
// Trials are independent; each derives its own generator from
// (master seed, trial index), so aggregate outputs are a pure function of
// the plan regardless of thread count.
#pragma once

#include <cstdint>
#include <map>
#include <random>

#include "difloc/analysis.hpp"
#include "difloc/sensors.hpp"

namespace difloc {

enum class Channel { ideal, noisy };

/// binomial: exact Binomial(n, p) draws. gaussian: N(m, m) rounded to the
/// nearest non-negative integer. auto_select: gaussian above mean 100,
/// binomial below.
enum class CountModel { auto_select, binomial, gaussian };

/// stochastic: sample the channel. zero: force every count to its exact
/// mean (unrounded) - decisions must then always be correct.
enum class NoiseMode { stochastic, zero };

enum class AbnormalityPrior { indicator_points, uniform_area };

struct TrialPlan {
    Arena arena{};
    DiffusionParams diff{};
    Strategy strategy = Strategy::collaborative;
    Channel channel = Channel::ideal;
    int L = 3;
    long trials = 100000;
    std::uint64_t seed = 1;
    CountModel model = CountModel::auto_select;
    NoiseMode noise = NoiseMode::stochastic;
    AbnormalityPrior prior = AbnormalityPrior::indicator_points;

    // Phase 1-2: walk the sensors instead of constructing the release event
    // directly. Off by default; the decision statistics condition on the
    // release count, so error-rate sweeps do not need the walk.
    bool use_sensor_walk = false;
    SensorParams sensors{};
    bool condition_on_quorum = true;  // non-collaborative fair-comparison mode

    int threads = 0;  // 0: hardware concurrency
    bool collect_confusion = false;

    // Noisy channel: expected relay factor alpha * mu_tilde. Negative means
    // "derive from the parameters"; tests pin 1.0 for exact compensation.
    double relay_scale_override = -1.0;

    void validate() const;
};

/// Derives the per-trial generator seed from the master seed and an index.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

/// K independent FC counts at distance d for one molecule type each:
/// Binomial(released, mu(d, T_obs)) or its rounded Gaussian approximation.
std::vector<double> sample_fc_counts(double d, const Arena& arena, const DiffusionParams& params,
                                     double released, CountModel model, std::mt19937_64& rng);

/// Componentwise gateway marker counts W^k ~ Binomial(alpha * y^k, mu_tilde)
/// (or the Gaussian approximation) - the genuine doubly stochastic channel.
std::vector<double> sample_gateway_counts(std::span<const double> y, const Arena& arena,
                                          const DiffusionParams& params, CountModel model,
                                          std::mt19937_64& rng);

/// Runs the plan and fills the empirical side of the report (empirical P_e,
/// 95% CI half-width, pre-snap rate for the radial scheme, flag counts and
/// optionally the confusion matrix).
ErrorReport run_trials(const TrialPlan& plan);

/// Integer-binned histogram with its first two raw moments.
struct CountHistogram {
    std::map<long, long> bins;
    long samples = 0;
    double mean = 0.0;
    double second_moment = 0.0;
};

/// Histogram of gateway counts for a single FC at distance d1 through the
/// full two-stage channel (Y then W), for validating the mean-value
/// approximation against the genuine doubly stochastic counts.
CountHistogram gateway_count_histogram(double d1, const Arena& arena,
                                       const DiffusionParams& params, long samples,
                                       std::uint64_t seed,
                                       CountModel model = CountModel::binomial);

}  // namespace difloc
