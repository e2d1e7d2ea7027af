// Observing-area geometry: the square arena, fusion-center placement and
// distances used by both localization schemes.
#pragma once

#include <cmath>
#include <stdexcept>

namespace difloc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Vec2 a, Vec2 b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Square observing area [0,w]^2 with fusion centers at three of its
/// vertices and a gateway at a common distance from every FC.
///
/// FC1 = [w,0], FC2 = [0,0], FC3 = [0,w]. The collaborative scheme uses
/// FC1/FC2, the non-collaborative one all three.
struct Arena {
    double side = 1e-2;              // w
    double gateway_distance = 5e-2;  // d_FG, common to all FCs

    static constexpr int dims = 2;

    Vec2 fc_position(int i) const {
        switch (i) {
            case 1: return {side, 0.0};
            case 2: return {0.0, 0.0};
            case 3: return {0.0, side};
        }
        throw std::invalid_argument("Arena::fc_position: index must be 1, 2 or 3");
    }

    double fc_distance(int i, Vec2 p) const { return distance(fc_position(i), p); }

    Vec2 center() const { return {side / 2.0, side / 2.0}; }

    bool contains(Vec2 p) const {
        return p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side;
    }

    /// Largest possible FC-to-point distance, w*sqrt(2).
    double max_fc_distance() const { return side * std::sqrt(2.0); }

    void validate() const {
        if (!(side > 0.0)) throw std::invalid_argument("Arena: side must be positive");
        if (!(gateway_distance > 0.0))
            throw std::invalid_argument("Arena: gateway distance must be positive");
    }
};

}  // namespace difloc
