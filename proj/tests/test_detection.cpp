#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "difloc/detection.hpp"
#include "difloc/medium.hpp"
#include "difloc/numerics.hpp"
#include "support.hpp"

using namespace difloc;

namespace {

const Arena kArena{1e-2, 5e-2};
const DiffusionParams kDiff{};
constexpr int kK = 2;

MeanFn table_mean(double released = 1e6) {
    return MeanCountModel::ideal(kArena, kDiff, released);
}

ObservationSet radial_obs(std::vector<double> fc1, std::vector<double> fc2) {
    ObservationSet o;
    o.counts = {std::move(fc1), std::move(fc2)};
    return o;
}

ObservationSet grid_obs(std::vector<double> fc1, std::vector<double> fc2,
                        std::vector<double> fc3) {
    ObservationSet o;
    o.counts = {std::move(fc1), std::move(fc2), std::move(fc3)};
    return o;
}

}  // namespace

TEST_CASE("tau_threshold value and symmetry") {
    const MeanFn m = [](double r) { return r == 1.0 ? 300.0 : 200.0; };
    const double t = tau_threshold(1.0, 2.0, 2, m);
    CHECK(t == doctest::Approx(120486.5581297298).epsilon(1e-12));
    CHECK(tau_threshold(2.0, 1.0, 2, m) == doctest::Approx(t).epsilon(1e-14));
    CHECK_THROWS_AS(tau_threshold(1.0, 1.0, 2, m), std::invalid_argument);
}

TEST_CASE("tau_threshold separates the hypothesis statistics") {
    // K m2^2 < tau < K m1^2 whenever m1 > m2; checked over the operating sweep.
    const MeanFn m = table_mean();
    const RadialScheme s = build_radial(kArena, 6);
    for (size_t j = 0; j + 1 < s.radii.size(); ++j) {
        const double m1 = m(s.radii[j]);
        const double m2 = m(s.radii[j + 1]);
        REQUIRE(m1 > m2);
        const double t = tau_threshold(s.radii[j], s.radii[j + 1], kK, m);
        CHECK(t > kK * m2 * m2);
        CHECK(t < kK * m1 * m1);
    }
}

TEST_CASE("tau ladder is strictly decreasing") {
    for (int L : {2, 4, 6, 8}) {
        const RadialScheme s = build_radial(kArena, L);
        const auto ladder = tau_ladder(s, kK, table_mean());
        for (size_t j = 1; j < ladder.size(); ++j) CHECK(ladder[j] < ladder[j - 1]);
    }
}

TEST_CASE("decide_radial returns the hypothesis at exact means") {
    const MeanFn m = table_mean();
    for (int L : {2, 3, 4, 5, 6}) {
        const RadialScheme s = build_radial(kArena, L);
        for (const RadialCluster& c : s.psi) {
            const auto [r1, r2] = s.ip_distances(c);
            const auto obs = radial_obs({m(r1), m(r1)}, {m(r2), m(r2)});
            const RadialDecision d = decide_radial(obs, s, kK, m);
            CHECK(d.cluster == c);
            CHECK_FALSE(d.snapped);
        }
    }
}

TEST_CASE("decide_radial clamps out-of-ladder statistics") {
    const MeanFn m = table_mean();
    const RadialScheme s = build_radial(kArena, 3);
    // Statistics above every threshold take the smallest radius; the joint
    // pair (0,0) is infeasible and snaps into Psi.
    const auto big = radial_obs({1e6, 1e6}, {1e6, 1e6});
    const RadialDecision d = decide_radial(big, s, kK, m);
    CHECK(d.raw == RadialCluster{0, 0});
    CHECK(d.snapped);
    CHECK(s.psi_index(d.cluster).has_value());
    // All-zero counts take the largest radius on both axes.
    const auto zero = radial_obs({0.0, 0.0}, {0.0, 0.0});
    const RadialDecision dz = decide_radial(zero, s, kK, m);
    const int last = static_cast<int>(s.radii.size()) - 1;
    CHECK(dz.raw == RadialCluster{last, last});
}

TEST_CASE("decide_radial snap tie-breaks toward smaller radii") {
    const MeanFn m = table_mean();
    const RadialScheme s = build_radial(kArena, 2);
    REQUIRE_FALSE(s.psi_index({0, 0}).has_value());
    const auto big = radial_obs({1e6, 1e6}, {1e6, 1e6});
    const RadialDecision d = decide_radial(big, s, kK, m);
    // (0,1) and (1,0) are equidistant from (0,0); the lexicographically
    // smaller pair wins.
    CHECK(d.cluster == RadialCluster{0, 1});
}

TEST_CASE("decide_radial observation shape errors") {
    const MeanFn m = table_mean();
    const RadialScheme s = build_radial(kArena, 2);
    ObservationSet three;
    three.counts = {{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(decide_radial(three, s, kK, m), std::invalid_argument);
    CHECK_THROWS_AS(decide_radial(radial_obs({1.0}, {1.0, 1.0}), s, kK, m),
                    std::invalid_argument);
}

TEST_CASE("ladder decision rate matches the Marcum band probability") {
    // Per-radius correct-decision rate against
    //   Q_{K/2}(sqrt(K m), sqrt(tau_below/m)) - Q_{K/2}(sqrt(K m), sqrt(tau_above/m))
    // at a resolution where the error rate is visible.
    const MeanFn m = table_mean();
    const RadialScheme s = build_radial(kArena, 6);
    const auto ladder = tau_ladder(s, kK, m);
    const int n_radii = static_cast<int>(s.radii.size());

    std::mt19937_64 rng(1234);
    const long trials = 100000;
    for (int j : {3, n_radii - 1}) {
        const double mj = m(s.radii[j]);
        const double a = std::sqrt(kK * mj);
        const double upper =
            (j == n_radii - 1) ? 1.0
                               : numerics::marcum_q(0.5 * kK, a, std::sqrt(ladder[j] / mj));
        const double lower =
            (j == 0) ? 0.0 : numerics::marcum_q(0.5 * kK, a, std::sqrt(ladder[j - 1] / mj));
        const double p_correct = upper - lower;

        std::normal_distribution<double> g(mj, std::sqrt(mj));
        long hits = 0;
        for (long t = 0; t < trials; ++t) {
            double ssum = 0.0;
            for (int k = 0; k < kK; ++k) {
                const double y = std::max(0.0, std::round(g(rng)));
                ssum += y * y;
            }
            int dec = 0;
            while (dec < n_radii - 1 && ssum <= ladder[dec]) ++dec;
            if (dec == j) ++hits;
        }
        const double rate = static_cast<double>(hits) / trials;
        const double se = std::sqrt(p_correct * (1.0 - p_correct) / trials);
        CHECK(std::abs(rate - p_correct) < 3.0 * se);
    }
}

TEST_CASE("exact ML on a single-radius hypothesis set") {
    RadialScheme s;
    s.arena = kArena;
    s.L = 2;
    s.radii = {7.5e-3};
    s.psi = {{0, 0}};
    const MeanFn m = table_mean();
    const auto obs = radial_obs({10.0, 20.0}, {500.0, 400.0});
    const RadialDecision d = exact_ml_radial(obs, s, kK, m);
    CHECK(d.cluster == RadialCluster{0, 0});
}

TEST_CASE("exact ML decides the true radius on exact means") {
    const MeanFn m = table_mean();
    const RadialScheme s = build_radial(kArena, 4);
    for (const RadialCluster& c : s.psi) {
        const auto [r1, r2] = s.ip_distances(c);
        const auto obs = radial_obs({m(r1), m(r1)}, {m(r2), m(r2)});
        CHECK(exact_ml_radial(obs, s, kK, m).raw == c);
    }
}

TEST_CASE("ladder and exact ML agree on simulated trials") {
    const MeanFn m = table_mean();
    const RadialScheme s = build_radial(kArena, 6);
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick(0, s.np() - 1);
    long agree = 0;
    const long trials = 10000;
    for (long t = 0; t < trials; ++t) {
        const auto [r1, r2] = s.ip_distances(s.psi[pick(rng)]);
        ObservationSet obs;
        obs.counts.resize(2);
        for (int i = 0; i < 2; ++i) {
            const double mi = m(i == 0 ? r1 : r2);
            std::normal_distribution<double> g(mi, std::sqrt(mi));
            for (int k = 0; k < kK; ++k)
                obs.counts[i].push_back(std::max(0.0, std::round(g(rng))));
        }
        if (decide_radial(obs, s, kK, m).raw == exact_ml_radial(obs, s, kK, m).raw) ++agree;
    }
    CHECK(static_cast<double>(agree) / trials >= 0.99);
}

TEST_CASE("exact ML decision is scale invariant up to ties") {
    const MeanFn m = table_mean();
    const RadialScheme s = build_radial(kArena, 5);
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> pick(0, s.np() - 1);

    auto objective = [&](const ObservationSet& obs, int fc, double r, const MeanFn& fn) {
        const double mv = fn(r);
        double quad = 0.0;
        for (double c : obs.counts[fc]) quad += (c - mv) * (c - mv);
        return kK * std::log(mv) + quad / mv;
    };

    for (double scale : {0.5, 2.0, 10.0}) {
        const MeanFn scaled = [&, scale](double d) { return scale * m(d); };
        for (int t = 0; t < 100; ++t) {
            const auto [r1, r2] = s.ip_distances(s.psi[pick(rng)]);
            ObservationSet obs;
            obs.counts.resize(2);
            for (int i = 0; i < 2; ++i) {
                const double mi = m(i == 0 ? r1 : r2);
                std::normal_distribution<double> g(mi, std::sqrt(mi));
                for (int k = 0; k < kK; ++k) obs.counts[i].push_back(std::max(0.0, g(rng)));
            }
            ObservationSet obs_scaled = obs;
            for (auto& fc : obs_scaled.counts)
                for (auto& c : fc) c *= scale;

            const RadialDecision base = exact_ml_radial(obs, s, kK, m);
            const RadialDecision mapped = exact_ml_radial(obs_scaled, s, kK, scaled);
            if (!(base.raw == mapped.raw)) {
                // Only near-ties may flip under rescaling.
                const int fc = base.raw.j1 != mapped.raw.j1 ? 0 : 1;
                const int ja = fc == 0 ? base.raw.j1 : base.raw.j2;
                const int jb = fc == 0 ? mapped.raw.j1 : mapped.raw.j2;
                const double oa = objective(obs, fc, s.radii[ja], m);
                const double ob = objective(obs, fc, s.radii[jb], m);
                CHECK(std::abs(oa - ob) < 1e-2 * (std::abs(oa) + 1.0));
            }
        }
    }
}

TEST_CASE("estimate_mean") {
    CHECK(estimate_mean(std::vector<double>{100.0, 100.0}) == 100.0);
    CHECK(estimate_mean(std::vector<double>{90.0, 110.0}) == 100.0);
    CHECK(estimate_mean(std::vector<double>{42.0}) == 42.0);
    CHECK_THROWS_AS(estimate_mean(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("gamma_threshold separates the means and zeroes the LLR") {
    const MeanFn m = table_mean();
    for (int L = 2; L <= 8; ++L) {
        const GridScheme g = build_grid(kArena, L);
        const auto means = grid_axis_means(g, m, 0);
        // Mid-area FC2 mean as the variance scalar.
        const double m_d2 = m(kArena.fc_distance(2, g.ip({(L + 1) / 2, (L + 1) / 2})));
        const auto gammas = gamma_ladder(means, kK, m_d2);
        REQUIRE(gammas.size() == static_cast<size_t>(L - 1));
        for (int i = 0; i + 1 < L; ++i) {
            CHECK(gammas[i] > means[i]);
            CHECK(gammas[i] < means[i + 1]);
            if (i > 0) CHECK(gammas[i] > gammas[i - 1]);
            // Defining property: the LLR vanishes at the root.
            const double v_lo = means[i] * (1.0 + means[i]) / (kK * m_d2);
            const double v_hi = means[i + 1] * (1.0 + means[i + 1]) / (kK * m_d2);
            const double a = 0.5 * (1.0 / v_hi - 1.0 / v_lo);
            const double b = means[i] / v_lo - means[i + 1] / v_hi;
            const double c = 0.5 * (std::log(v_hi / v_lo) +
                                    means[i + 1] * means[i + 1] / v_hi -
                                    means[i] * means[i] / v_lo);
            const double z = gammas[i];
            CHECK(std::abs(a * z * z + b * z + c) < 1e-9);
        }
    }
}

TEST_CASE("gamma_threshold equal-variance degeneracy is linear") {
    // a = 0: the rule collapses to z = -c/b.
    const double mu1 = 1.0, mu2 = 3.0, var = 0.25;
    const double g = gamma_threshold(mu1, var, mu2, var);
    const double b = mu1 / var - mu2 / var;
    const double c = 0.5 * (mu2 * mu2 - mu1 * mu1) / var;
    CHECK(g == doctest::Approx(-c / b).epsilon(1e-12));
    CHECK(g == doctest::Approx(0.5 * (mu1 + mu2)).epsilon(1e-12));
    CHECK(g > mu1);
    CHECK(g < mu2);
}

TEST_CASE("gamma_threshold raises when no root separates the means") {
    // Concave LLR whose roots lie outside (1, 2).
    CHECK_THROWS_AS(gamma_threshold(2.0, 1.0, 1.0, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(gamma_threshold(1.0, 0.5, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("grid axis means: unit ratio at the central column") {
    const MeanFn m = table_mean();
    const GridScheme g = build_grid(kArena, 3);
    const auto mx = grid_axis_means(g, m, 0);
    CHECK(mx[1] == doctest::Approx(1.0).epsilon(1e-12));  // s_x = w/2
    CHECK(mx[0] < 1.0);
    CHECK(mx[2] > 1.0);
    // Strictly increasing in the column index.
    for (size_t i = 1; i < mx.size(); ++i) CHECK(mx[i] > mx[i - 1]);
}

TEST_CASE("decide_grid returns the hypothesis at exact means") {
    const MeanFn m = table_mean();
    for (int L : {2, 3, 4, 5, 6}) {
        const GridScheme g = build_grid(kArena, L);
        for (int ix = 1; ix <= L; ++ix) {
            for (int iy = 1; iy <= L; ++iy) {
                const Vec2 p = g.ip({ix, iy});
                std::vector<std::vector<double>> counts(3);
                for (int fc = 1; fc <= 3; ++fc)
                    counts[fc - 1].assign(kK, m(kArena.fc_distance(fc, p)));
                ObservationSet obs;
                obs.counts = std::move(counts);
                const GridDecision d = decide_grid(obs, g, kK, m);
                CHECK(d.cell == GridCell{ix, iy});
                CHECK_FALSE(d.flagged);
            }
        }
    }
}

TEST_CASE("decide_grid x-decision ignores FC3 counts") {
    const MeanFn m = table_mean();
    const GridScheme g = build_grid(kArena, 4);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(50.0, 700.0);
    for (int t = 0; t < 200; ++t) {
        const std::vector<double> fc1{u(rng), u(rng)};
        const std::vector<double> fc2{u(rng), u(rng)};
        const auto base = decide_grid(grid_obs(fc1, fc2, {u(rng), u(rng)}), g, kK, m);
        const auto perturbed = decide_grid(grid_obs(fc1, fc2, {u(rng), u(rng)}), g, kK, m);
        CHECK(base.cell.ix == perturbed.cell.ix);
        CHECK(base.z12 == perturbed.z12);
    }
}

TEST_CASE("decide_grid degenerate FC2 handling") {
    const MeanFn m = table_mean();
    const GridScheme g = build_grid(kArena, 3);

    // Default: the half-count floor keeps the ratio path alive and flags.
    const auto floored = decide_grid(grid_obs({600.0, 600.0}, {0.0, 0.0}, {30.0, 30.0}), g, kK, m);
    CHECK(floored.flagged);

    // Floor off, fallback on: decide from the FC1/FC3 magnitudes alone.
    GridDecodeOptions opts;
    opts.half_count_floor = false;
    const Vec2 near_fc1 = g.ip({3, 1});
    const double v1 = m(kArena.fc_distance(1, near_fc1));
    const double v3 = m(kArena.fc_distance(3, near_fc1));
    const auto fb = decide_grid(grid_obs({v1, v1}, {0.0, 0.0}, {v3, v3}), g, kK, m, opts);
    CHECK(fb.flagged);
    CHECK(fb.cell == GridCell{3, 1});

    // Both disabled: degenerate input is an error.
    opts.fallback_on_degenerate = false;
    CHECK_THROWS_AS(decide_grid(grid_obs({1.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}), g, kK, m, opts),
                    std::invalid_argument);
}

TEST_CASE("decide_grid observation shape errors") {
    const MeanFn m = table_mean();
    const GridScheme g = build_grid(kArena, 2);
    CHECK_THROWS_AS(decide_grid(radial_obs({1.0, 1.0}, {1.0, 1.0}), g, kK, m),
                    std::invalid_argument);
}

TEST_CASE("noisy-channel decision means keep the ratio structure") {
    // The relay factor scales every mean, so the axis ratio means are
    // unchanged while tau thresholds rescale.
    const MeanFn ideal = table_mean();
    const double scale = kDiff.amplification * marker_hit_probability(kArena, kDiff);
    const MeanFn noisy = MeanCountModel::noisy(kArena, kDiff, 1e6);
    const GridScheme g = build_grid(kArena, 3);
    const auto mi = grid_axis_means(g, ideal, 0);
    const auto mn = grid_axis_means(g, noisy, 0);
    for (size_t i = 0; i < mi.size(); ++i) CHECK(mn[i] == doctest::Approx(mi[i]).epsilon(1e-12));
    CHECK(noisy(5e-3) == doctest::Approx(scale * ideal(5e-3)).epsilon(1e-12));
}
