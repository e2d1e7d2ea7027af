#include "difloc/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace difloc {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Writes content to path via a temporary file; removes the temporary on
// failure so aborted runs leave no partial CSVs behind.
void write_atomically(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out.good()) {
            out.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

ErrorReport analytic_report(const ScenarioConfig& cfg) {
    const MeanFn mean_fn = [&] {
        if (cfg.channel == Channel::noisy)
            return MeanFn(MeanCountModel::noisy(cfg.arena, cfg.diff, cfg.diff.released_per_type));
        return MeanFn(MeanCountModel::ideal(cfg.arena, cfg.diff, cfg.diff.released_per_type));
    }();
    if (cfg.strategy == Strategy::collaborative) {
        const RadialScheme scheme = build_radial(cfg.arena, cfg.L);
        return cfg.channel == Channel::noisy ? pe_noisy(scheme, cfg.diff.samples_per_fc, mean_fn)
                                             : pe_radial(scheme, cfg.diff.samples_per_fc, mean_fn);
    }
    const GridScheme scheme = build_grid(cfg.arena, cfg.L);
    return cfg.channel == Channel::noisy ? pe_noisy(scheme, cfg.diff.samples_per_fc, mean_fn)
                                         : pe_grid(scheme, cfg.diff.samples_per_fc, mean_fn);
}

}  // namespace

ErrorReport evaluate_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    ErrorReport analytic = analytic_report(cfg);
    ErrorReport empirical = run_trials(cfg.to_plan());
    empirical.analytic_pe = analytic.analytic_pe;
    empirical.per_cluster_correct = std::move(analytic.per_cluster_correct);
    empirical.lemma2_warning = analytic.lemma2_warning;
    return empirical;
}

std::string results_csv_header() {
    return "preset,strategy,channel,L,resolution,w,D,D2,VF,VG,K,NthM,alpha,dFG,trials,seed,"
           "analytic_pe,empirical_pe,ci95_halfwidth,empirical_pe_presnap,lemma2_warning,"
           "flagged_trials";
}

std::string results_csv_row(const ExperimentRow& row) {
    const ScenarioConfig& c = row.cfg;
    const ErrorReport& r = row.report;
    std::ostringstream os;
    const double resolution = (c.L / c.arena.side) * (c.L / c.arena.side);
    os << row.preset << ',' << to_string(c.strategy) << ',' << to_string(c.channel) << ',' << c.L
       << ',' << fmt(resolution) << ',' << fmt(c.arena.side) << ',' << fmt(c.diff.diff_molecule)
       << ',' << fmt(c.diff.diff_marker) << ',' << fmt(c.diff.volume_fc) << ','
       << fmt(c.diff.volume_gateway) << ',' << c.diff.samples_per_fc << ','
       << fmt(c.diff.released_per_type) << ',' << fmt(c.diff.amplification) << ','
       << fmt(c.arena.gateway_distance) << ',' << c.trials << ',' << c.seed << ','
       << fmt(r.analytic_pe.value_or(-1.0)) << ',' << fmt(r.empirical_pe.value_or(-1.0)) << ','
       << fmt(r.ci95_halfwidth) << ','
       << (r.empirical_pe_presnap ? fmt(*r.empirical_pe_presnap) : std::string("")) << ','
       << (r.lemma2_warning ? 1 : 0) << ',' << r.flagged_trials;
    return os.str();
}

namespace {

void append_rows(std::string& csv, const std::string& preset, ScenarioConfig cfg,
                 std::vector<ExperimentRow>* rows) {
    ExperimentRow row;
    row.preset = preset;
    row.cfg = cfg;
    row.report = evaluate_scenario(cfg);
    csv += results_csv_row(row) + "\n";
    if (rows) rows->push_back(std::move(row));
}

std::string manifest_text(const std::string& preset, const ScenarioConfig& base) {
    std::string out;
    out += "artifact_version = " + std::string(kArtifactVersion) + "\n";
    out += "preset = " + preset + "\n";
    out += base.to_key_values();
    return out;
}

RunResult run_results_preset(const std::string& preset, const ScenarioConfig& base,
                             const fs::path& out_dir) {
    std::string csv = results_csv_header() + "\n";

    if (preset == "custom") {
        append_rows(csv, preset, base, nullptr);
    } else if (preset == "fig3") {
        // P_e versus resolution for both strategies and three release sizes.
        for (Strategy s : {Strategy::collaborative, Strategy::noncollaborative})
            for (double nthm : {1e6, 2e6, 3e6})
                for (int L = 2; L <= 10; ++L) {
                    ScenarioConfig cfg = base;
                    cfg.strategy = s;
                    cfg.channel = Channel::ideal;
                    cfg.diff.released_per_type = nthm;
                    cfg.L = L;
                    append_rows(csv, preset, cfg, nullptr);
                }
    } else if (preset == "fig4") {
        // P_e versus total molecules K * NthM at fixed resolutions.
        for (Strategy s : {Strategy::collaborative, Strategy::noncollaborative})
            for (int L : {3, 4, 5})
                for (double nthm : {1e6, 2e6, 3e6, 4e6, 5e6}) {
                    ScenarioConfig cfg = base;
                    cfg.strategy = s;
                    cfg.channel = Channel::ideal;
                    cfg.L = L;
                    cfg.diff.released_per_type = nthm;
                    append_rows(csv, preset, cfg, nullptr);
                }
    } else if (preset == "fig5") {
        // Noisy channel: P_e versus amplification for several FC-gateway
        // distances, at NthM = 1e8.
        for (Strategy s : {Strategy::collaborative, Strategy::noncollaborative})
            for (double mult : {3.0, 5.0, 7.0})
                for (double alpha : {1e2, 3.16e2, 1e3, 3.16e3, 1e4}) {
                    ScenarioConfig cfg = base;
                    cfg.strategy = s;
                    cfg.channel = Channel::noisy;
                    cfg.diff.released_per_type = 1e8;
                    cfg.diff.amplification = alpha;
                    cfg.arena.gateway_distance = mult * cfg.arena.side;
                    append_rows(csv, preset, cfg, nullptr);
                }
    } else {
        throw std::invalid_argument("unknown preset: " + preset);
    }

    RunResult result;
    const fs::path csv_path = out_dir / (preset + ".csv");
    write_atomically(csv_path, csv);
    result.files_written.push_back(csv_path.string());
    const fs::path manifest_path = out_dir / (preset + ".manifest.txt");
    write_atomically(manifest_path, manifest_text(preset, base));
    result.files_written.push_back(manifest_path.string());
    return result;
}

RunResult run_fig6(const ScenarioConfig& base, const fs::path& out_dir) {
    // Gateway-count histograms against the mean-value-approximation density
    // at d1 = 8.3e-4, d_FG = 5w.
    ScenarioConfig cfg = base;
    cfg.arena.gateway_distance = 5.0 * cfg.arena.side;
    const double d1 = 8.3e-4;
    const long samples = cfg.trials;

    std::string hist_csv = "alpha,d1,dFG,NthM,samples,bin,count,empirical_density,approx_density\n";
    std::string mom_csv =
        "alpha,d1,dFG,NthM,samples,mean_empirical,mean_approx,second_moment_empirical,"
        "second_moment_approx,mean_rel_err,second_moment_rel_err\n";

    for (double alpha : {1e3, 1e4}) {
        cfg.diff.amplification = alpha;
        const CountHistogram h = gateway_count_histogram(d1, cfg.arena, cfg.diff, samples,
                                                         cfg.seed, CountModel::binomial);
        const double mg =
            MeanCountModel::noisy(cfg.arena, cfg.diff, cfg.diff.released_per_type)(d1);
        const double inv_norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi * mg));
        for (const auto& [bin, count] : h.bins) {
            const double density = static_cast<double>(count) / static_cast<double>(h.samples);
            const double approx =
                inv_norm * std::exp(-0.5 * (bin - mg) * (bin - mg) / mg);
            hist_csv += fmt(alpha) + "," + fmt(d1) + "," + fmt(cfg.arena.gateway_distance) + "," +
                        fmt(cfg.diff.released_per_type) + "," + std::to_string(h.samples) + "," +
                        std::to_string(bin) + "," + std::to_string(count) + "," + fmt(density) +
                        "," + fmt(approx) + "\n";
        }
        const double mean_approx = mg;
        const double m2_approx = mg + mg * mg;
        mom_csv += fmt(alpha) + "," + fmt(d1) + "," + fmt(cfg.arena.gateway_distance) + "," +
                   fmt(cfg.diff.released_per_type) + "," + std::to_string(h.samples) + "," +
                   fmt(h.mean) + "," + fmt(mean_approx) + "," + fmt(h.second_moment) + "," +
                   fmt(m2_approx) + "," + fmt(std::abs(h.mean - mean_approx) / mean_approx) + "," +
                   fmt(std::abs(h.second_moment - m2_approx) / m2_approx) + "\n";
    }

    RunResult result;
    const fs::path hist_path = out_dir / "fig6.csv";
    write_atomically(hist_path, hist_csv);
    result.files_written.push_back(hist_path.string());
    const fs::path mom_path = out_dir / "fig6_moments.csv";
    write_atomically(mom_path, mom_csv);
    result.files_written.push_back(mom_path.string());
    const fs::path manifest_path = out_dir / "fig6.manifest.txt";
    write_atomically(manifest_path, manifest_text("fig6", base));
    result.files_written.push_back(manifest_path.string());
    return result;
}

}  // namespace

RunResult run_preset(const std::string& preset, const ScenarioConfig& base,
                     const std::string& out_dir) {
    base.validate();
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    if (preset == "fig6") return run_fig6(base, dir);
    return run_results_preset(preset, base, dir);
}

}  // namespace difloc
