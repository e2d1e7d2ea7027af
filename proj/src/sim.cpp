#include "difloc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace difloc {

void TrialPlan::validate() const {
    arena.validate();
    diff.validate();
    if (trials < 1) throw std::invalid_argument("TrialPlan: trials must be >= 1");
    if (L < 2) throw std::invalid_argument("TrialPlan: L must be >= 2");
    if (threads < 0) throw std::invalid_argument("TrialPlan: threads must be >= 0");
    if (use_sensor_walk) sensors.validate();
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over the combined counter; decorrelates consecutive trials.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

double draw_count(double n, double p, CountModel model, std::mt19937_64& rng) {
    if (n <= 0.0 || p <= 0.0) return 0.0;
    const double mean = n * p;
    const bool gaussian = model == CountModel::gaussian ||
                          (model == CountModel::auto_select && mean > 100.0);
    if (gaussian) {
        std::normal_distribution<double> g(mean, std::sqrt(mean));
        return std::max(0.0, std::round(g(rng)));
    }
    const auto trials = static_cast<long long>(std::llround(n));
    std::binomial_distribution<long long> bin(trials, std::min(p, 1.0));
    return static_cast<double>(bin(rng));
}

}  // namespace

std::vector<double> sample_fc_counts(double d, const Arena& arena, const DiffusionParams& params,
                                     double released, CountModel model, std::mt19937_64& rng) {
    if (released < 0.0) throw std::invalid_argument("sample_fc_counts: released must be >= 0");
    const double p =
        released > 0.0 ? hit_probability(d, observation_time(arena, params), params.volume_fc,
                                         params.diff_molecule, Arena::dims)
                       : 0.0;
    std::vector<double> counts(params.samples_per_fc);
    for (auto& c : counts) c = draw_count(released, p, model, rng);
    return counts;
}

std::vector<double> sample_gateway_counts(std::span<const double> y, const Arena& arena,
                                          const DiffusionParams& params, CountModel model,
                                          std::mt19937_64& rng) {
    const double p = marker_hit_probability(arena, params);
    std::vector<double> counts(y.size());
    for (size_t k = 0; k < y.size(); ++k) {
        if (y[k] < 0.0) throw std::invalid_argument("sample_gateway_counts: negative count");
        counts[k] = draw_count(params.amplification * y[k], p, model, rng);
    }
    return counts;
}

namespace {

struct Accumulator {
    long errors = 0;
    long presnap_errors = 0;
    long flagged = 0;
    long snapped = 0;
    std::vector<long> confusion;

    void merge(const Accumulator& other) {
        errors += other.errors;
        presnap_errors += other.presnap_errors;
        flagged += other.flagged;
        snapped += other.snapped;
        if (confusion.size() == other.confusion.size())
            for (size_t i = 0; i < confusion.size(); ++i) confusion[i] += other.confusion[i];
    }
};

struct RadialContext {
    RadialScheme scheme;
    MeanFn decision_mean;
    MeanCountModel observation_mean;  // exact means for zero-noise mode
};

struct GridContext {
    GridScheme scheme;
    MeanFn decision_mean;
    MeanCountModel observation_mean;
};

double relay_scale(const TrialPlan& plan) {
    if (plan.relay_scale_override >= 0.0) return plan.relay_scale_override;
    return plan.diff.amplification * marker_hit_probability(plan.arena, plan.diff);
}

// Representative point of a radial hypothesis: the intersection of the two
// distance circles, clamped into the area. Some capped cells have no exact
// intersection inside A; the clamp keeps the sensor walk well-defined there.
Vec2 radial_site(const Arena& arena, double d1, double d2) {
    const double w = arena.side;
    const double x = (w * w + d2 * d2 - d1 * d1) / (2.0 * w);
    const double y2 = d2 * d2 - x * x;
    Vec2 p{std::clamp(x, 0.0, w), std::clamp(y2 > 0.0 ? std::sqrt(y2) : 0.0, 0.0, w)};
    return p;
}

// One trial of the radial (collaborative) pipeline. Returns {final error,
// presnap error, snapped}.
void radial_trial(const TrialPlan& plan, const RadialContext& ctx, long trial_index,
                  Accumulator& acc) {
    std::mt19937_64 rng(substream_seed(plan.seed, static_cast<std::uint64_t>(trial_index)));

    // Ground truth: a Psi member (hypothesis prior) or the cell of a uniform
    // point. The radial statistics depend on the point only through its
    // distances, so hypothesis trials sample the indicator distances.
    RadialCluster truth;
    double d1, d2;
    if (plan.prior == AbnormalityPrior::indicator_points) {
        std::uniform_int_distribution<int> pick(0, ctx.scheme.np() - 1);
        truth = ctx.scheme.psi[pick(rng)];
        std::tie(d1, d2) = ctx.scheme.ip_distances(truth);
    } else {
        std::uniform_real_distribution<double> u(0.0, plan.arena.side);
        const Vec2 p{u(rng), u(rng)};
        truth = locate_cluster(ctx.scheme, p);
        d1 = plan.arena.fc_distance(1, p);
        d2 = plan.arena.fc_distance(2, p);
    }

    double released = plan.diff.released_per_type;
    if (plan.use_sensor_walk) {
        WalkOptions wo;
        wo.condition_on_quorum = false;
        ReleaseEvent ev = walk_until_release(plan.sensors, plan.arena,
                                             radial_site(plan.arena, d1, d2),
                                             Strategy::collaborative,
                                             substream_seed(plan.seed ^ 0xabcdULL,
                                                            static_cast<std::uint64_t>(trial_index)),
                                             wo);
        released = static_cast<double>(ev.n_released) * plan.sensors.molecules_per_type;
    }

    ObservationSet obs;
    obs.semantics =
        plan.channel == Channel::ideal ? CountSemantics::fc_molecules : CountSemantics::gateway_markers;
    obs.counts.resize(2);
    const int K = plan.diff.samples_per_fc;
    for (int i = 0; i < 2; ++i) {
        const double d = i == 0 ? d1 : d2;
        if (plan.noise == NoiseMode::zero) {
            obs.counts[i].assign(K, ctx.observation_mean(d));
        } else {
            obs.counts[i] = sample_fc_counts(d, plan.arena, plan.diff, released, plan.model, rng);
            if (plan.channel == Channel::noisy)
                obs.counts[i] =
                    sample_gateway_counts(obs.counts[i], plan.arena, plan.diff, plan.model, rng);
        }
    }
    const RadialDecision dec = decide_radial(obs, ctx.scheme, K, ctx.decision_mean);
    if (dec.snapped) ++acc.snapped;
    if (!(dec.raw == truth)) ++acc.presnap_errors;
    if (!(dec.cluster == truth)) ++acc.errors;
    if (!acc.confusion.empty()) {
        const auto t = ctx.scheme.psi_index(truth);
        const auto e = ctx.scheme.psi_index(dec.cluster);
        if (t && e) ++acc.confusion[*t * ctx.scheme.np() + *e];
    }
}

void grid_trial(const TrialPlan& plan, const GridContext& ctx, long trial_index,
                Accumulator& acc) {
    std::mt19937_64 rng(substream_seed(plan.seed, static_cast<std::uint64_t>(trial_index)));
    const int L = ctx.scheme.L;

    GridCell truth;
    Vec2 site;
    if (plan.prior == AbnormalityPrior::indicator_points) {
        std::uniform_int_distribution<int> pick(1, L);
        truth = {pick(rng), pick(rng)};
        site = ctx.scheme.ip(truth);
    } else {
        std::uniform_real_distribution<double> u(0.0, plan.arena.side);
        site = {u(rng), u(rng)};
        truth = locate_cluster(ctx.scheme, site);
    }

    double released = plan.diff.released_per_type;
    if (plan.use_sensor_walk) {
        WalkOptions wo;
        wo.condition_on_quorum = plan.condition_on_quorum;
        ReleaseEvent ev = walk_until_release(plan.sensors, plan.arena, site,
                                             Strategy::noncollaborative,
                                             substream_seed(plan.seed ^ 0xabcdULL,
                                                            static_cast<std::uint64_t>(trial_index)),
                                             wo);
        released = static_cast<double>(ev.n_released) * plan.sensors.molecules_per_type;
    }

    ObservationSet obs;
    obs.semantics =
        plan.channel == Channel::ideal ? CountSemantics::fc_molecules : CountSemantics::gateway_markers;
    obs.counts.resize(3);
    const int K = plan.diff.samples_per_fc;
    for (int i = 0; i < 3; ++i) {
        const double d = plan.arena.fc_distance(i + 1, site);
        if (plan.noise == NoiseMode::zero) {
            obs.counts[i].assign(K, ctx.observation_mean(d));
        } else {
            obs.counts[i] = sample_fc_counts(d, plan.arena, plan.diff, released, plan.model, rng);
            if (plan.channel == Channel::noisy)
                obs.counts[i] =
                    sample_gateway_counts(obs.counts[i], plan.arena, plan.diff, plan.model, rng);
        }
    }

    const GridDecision dec = decide_grid(obs, ctx.scheme, K, ctx.decision_mean);
    if (dec.flagged) ++acc.flagged;
    if (!(dec.cell == truth)) ++acc.errors;
    if (!acc.confusion.empty()) {
        const int t = (truth.ix - 1) * L + (truth.iy - 1);
        const int e = (dec.cell.ix - 1) * L + (dec.cell.iy - 1);
        ++acc.confusion[t * L * L + e];
    }
}

template <typename TrialFn>
Accumulator run_parallel(const TrialPlan& plan, int confusion_dim, TrialFn&& trial_fn) {
    int n_threads = plan.threads > 0 ? plan.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = static_cast<int>(std::min<long>(n_threads, plan.trials));

    std::vector<Accumulator> parts(n_threads);
    if (plan.collect_confusion)
        for (auto& p : parts) p.confusion.assign(static_cast<size_t>(confusion_dim) * confusion_dim, 0);

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_threads);
    pool.reserve(n_threads);
    const long per = plan.trials / n_threads;
    const long extra = plan.trials % n_threads;
    long start = 0;
    for (int t = 0; t < n_threads; ++t) {
        const long count = per + (t < extra ? 1 : 0);
        pool.emplace_back([&, start, count, t] {
            try {
                for (long i = start; i < start + count; ++i) trial_fn(i, parts[t]);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
        start += count;
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    Accumulator total;
    if (plan.collect_confusion)
        total.confusion.assign(static_cast<size_t>(confusion_dim) * confusion_dim, 0);
    for (const auto& p : parts) total.merge(p);
    return total;
}

}  // namespace

ErrorReport run_trials(const TrialPlan& plan) {
    plan.validate();

    ErrorReport report;
    const int K = plan.diff.samples_per_fc;
    const double released = plan.diff.released_per_type;
    const double scale = plan.channel == Channel::noisy ? relay_scale(plan) : 1.0;
    const MeanCountModel model =
        MeanCountModel::with_scale(plan.arena, plan.diff, released, scale);
    const MeanFn mean_fn = model;

    Accumulator acc;
    int confusion_dim = 0;
    if (plan.strategy == Strategy::collaborative) {
        RadialContext ctx{build_radial(plan.arena, plan.L), mean_fn, model};
        confusion_dim = ctx.scheme.np();
        acc = run_parallel(plan, confusion_dim,
                           [&](long i, Accumulator& a) { radial_trial(plan, ctx, i, a); });
        report.config = "radial L=" + std::to_string(plan.L);
        report.empirical_pe_presnap =
            static_cast<double>(acc.presnap_errors) / static_cast<double>(plan.trials);
    } else {
        GridContext ctx{build_grid(plan.arena, plan.L), mean_fn, model};
        confusion_dim = ctx.scheme.cell_count();
        acc = run_parallel(plan, confusion_dim,
                           [&](long i, Accumulator& a) { grid_trial(plan, ctx, i, a); });
        report.config = "grid L=" + std::to_string(plan.L);
    }
    if (plan.channel == Channel::noisy) report.config += " noisy";

    report.trials = plan.trials;
    report.errors = acc.errors;
    report.empirical_pe = static_cast<double>(acc.errors) / static_cast<double>(plan.trials);
    report.ci95_halfwidth = proportion_ci95(*report.empirical_pe, plan.trials);
    report.flagged_trials = acc.flagged;
    report.snapped_trials = acc.snapped;
    if (plan.collect_confusion) {
        report.confusion = std::move(acc.confusion);
        report.confusion_dim = confusion_dim;
    }
    return report;
}

CountHistogram gateway_count_histogram(double d1, const Arena& arena,
                                       const DiffusionParams& params, long samples,
                                       std::uint64_t seed, CountModel model) {
    if (samples < 1) throw std::invalid_argument("gateway_count_histogram: samples must be >= 1");
    CountHistogram h;
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < samples; ++i) {
        std::mt19937_64 rng(substream_seed(seed, static_cast<std::uint64_t>(i)));
        const auto y =
            sample_fc_counts(d1, arena, params, params.released_per_type, model, rng);
        const auto w = sample_gateway_counts({y.data(), 1}, arena, params, model, rng);
        const double v = w[0];
        ++h.bins[std::lround(v)];
        sum += v;
        sum2 += v * v;
    }
    h.samples = samples;
    h.mean = sum / static_cast<double>(samples);
    h.second_moment = sum2 / static_cast<double>(samples);
    return h;
}

}  // namespace difloc
