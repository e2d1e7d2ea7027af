// Decision clusters and indicator points for the two localization schemes:
// radial distance-interval clustering (two FCs) and square grid clustering
// (three FCs). Schemes are immutable after construction.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "difloc/geometry.hpp"

namespace difloc {

/// A radial cluster identified by the distance-interval indices of its
/// point set: j_i = floor(d_i * L / w) (intervals closed on the left).
struct RadialCluster {
    int j1 = 0;
    int j2 = 0;
    friend bool operator==(RadialCluster, RadialCluster) = default;
    friend auto operator<=>(RadialCluster, RadialCluster) = default;
};

/// Radial clustering: distance intervals of width w/L toward FC1 and FC2,
/// indicator radii r_j = (j + 1/2) * w / L capped at w*sqrt(2), and the set
/// Psi of interval pairs that contain at least one point of the area.
struct RadialScheme {
    Arena arena;
    int L = 2;
    std::vector<double> radii;        // ascending, r_j <= w*sqrt(2)
    std::vector<RadialCluster> psi;   // lexicographically sorted
    int raster_resolution = 0;        // resolution used to build psi

    int np() const { return static_cast<int>(psi.size()); }

    /// Indicator distances (r_{j1}, r_{j2}) of a cluster.
    std::pair<double, double> ip_distances(RadialCluster c) const {
        return {radii.at(c.j1), radii.at(c.j2)};
    }

    std::optional<int> psi_index(RadialCluster c) const;
};

/// Builds the radial scheme. Psi is found by rasterizing the area at the
/// given resolution and marking non-empty interval pairs. Throws
/// std::invalid_argument for L < 2.
RadialScheme build_radial(const Arena& arena, int L, int raster_resolution = 1000);

/// A grid cell addressed by 1-based column/row indices.
struct GridCell {
    int ix = 1;
    int iy = 1;
    friend bool operator==(GridCell, GridCell) = default;
    friend auto operator<=>(GridCell, GridCell) = default;
};

/// Square grid clustering: L x L cells of side w/L with indicator points at
/// [(i - 1/2) w/L, (j - 1/2) w/L].
struct GridScheme {
    Arena arena;
    int L = 2;

    Vec2 ip(GridCell c) const {
        const double h = arena.side / L;
        return {(c.ix - 0.5) * h, (c.iy - 0.5) * h};
    }

    /// All L^2 indicator points, column-major in ix then iy.
    std::vector<Vec2> ip_coordinates() const;

    int cell_count() const { return L * L; }
};

/// Builds the grid scheme. Throws std::invalid_argument for L < 2.
GridScheme build_grid(const Arena& arena, int L);

/// Ground-truth cluster of a point under the radial scheme: the interval
/// indices of its true distances to FC1 and FC2. The result may lie outside
/// Psi for points whose cell was capped away by the w*sqrt(2) radius limit.
/// Throws std::invalid_argument for points outside the area.
RadialCluster locate_cluster(const RadialScheme& scheme, Vec2 point);

/// Ground-truth cell of a point under the grid scheme (far boundary points
/// belong to the last cell). Throws for points outside the area.
GridCell locate_cluster(const GridScheme& scheme, Vec2 point);

}  // namespace difloc
