#include "difloc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace difloc {

std::optional<int> RadialScheme::psi_index(RadialCluster c) const {
    auto it = std::lower_bound(psi.begin(), psi.end(), c);
    if (it != psi.end() && *it == c) return static_cast<int>(it - psi.begin());
    return std::nullopt;
}

RadialScheme build_radial(const Arena& arena, int L, int raster_resolution) {
    arena.validate();
    if (L < 2) throw std::invalid_argument("build_radial: L must be >= 2");
    if (raster_resolution < 16)
        throw std::invalid_argument("build_radial: raster resolution too small");

    RadialScheme scheme;
    scheme.arena = arena;
    scheme.L = L;
    scheme.raster_resolution = raster_resolution;

    const double w = arena.side;
    const double h = w / L;
    const double r_max = arena.max_fc_distance();
    for (int j = 0;; ++j) {
        const double r = (j + 0.5) * h;
        if (r > r_max) break;
        scheme.radii.push_back(r);
    }
    const int n_radii = static_cast<int>(scheme.radii.size());

    // Mark interval pairs realized by some point of the area.
    const Vec2 fc1 = arena.fc_position(1);
    const Vec2 fc2 = arena.fc_position(2);
    std::set<RadialCluster> cells;
    const double step = w / raster_resolution;
    for (int a = 0; a < raster_resolution; ++a) {
        const double x = (a + 0.5) * step;
        for (int b = 0; b < raster_resolution; ++b) {
            const double y = (b + 0.5) * step;
            const int j1 = static_cast<int>(std::floor(distance({x, y}, fc1) * L / w));
            const int j2 = static_cast<int>(std::floor(distance({x, y}, fc2) * L / w));
            if (j1 < n_radii && j2 < n_radii) cells.insert({j1, j2});
        }
    }
    scheme.psi.assign(cells.begin(), cells.end());
    if (scheme.psi.empty()) throw std::invalid_argument("build_radial: empty cluster set");
    return scheme;
}

std::vector<Vec2> GridScheme::ip_coordinates() const {
    std::vector<Vec2> out;
    out.reserve(static_cast<size_t>(L) * L);
    for (int ix = 1; ix <= L; ++ix)
        for (int iy = 1; iy <= L; ++iy) out.push_back(ip({ix, iy}));
    return out;
}

GridScheme build_grid(const Arena& arena, int L) {
    arena.validate();
    if (L < 2) throw std::invalid_argument("build_grid: L must be >= 2");
    return GridScheme{arena, L};
}

namespace {
int interval_index(double v, double w, int L, int max_index) {
    int j = static_cast<int>(std::floor(v * L / w));
    if (j > max_index) j = max_index;  // far boundary belongs to the last interval
    return j;
}
}  // namespace

RadialCluster locate_cluster(const RadialScheme& scheme, Vec2 point) {
    if (!scheme.arena.contains(point))
        throw std::invalid_argument("locate_cluster: point outside the observing area");
    const double w = scheme.arena.side;
    const double d1 = distance(point, scheme.arena.fc_position(1));
    const double d2 = distance(point, scheme.arena.fc_position(2));
    // No clamping here: the true interval index is reported even when the
    // radius list was capped before it.
    return {static_cast<int>(std::floor(d1 * scheme.L / w)),
            static_cast<int>(std::floor(d2 * scheme.L / w))};
}

GridCell locate_cluster(const GridScheme& scheme, Vec2 point) {
    if (!scheme.arena.contains(point))
        throw std::invalid_argument("locate_cluster: point outside the observing area");
    const double w = scheme.arena.side;
    return {interval_index(point.x, w, scheme.L, scheme.L - 1) + 1,
            interval_index(point.y, w, scheme.L, scheme.L - 1) + 1};
}

}  // namespace difloc
