#pragma once

#include <cmath>
#include <vector>

#include "lsv/errors.hpp"

namespace lsv {

/// Uniform simulation grid t_k = k*dt, k = 0..n_steps, with a subset of
/// nodes marked as calibration knots.  Knots are stored as step indices so
/// time lookups never rely on float equality.
struct TimeGrid {
    double dt = 0.0;
    int n_steps = 0;
    std::vector<int> knot_steps;  // strictly increasing, in (0, n_steps]

    double time(int step) const { return dt * step; }
    double horizon() const { return dt * n_steps; }
    int n_knots() const { return static_cast<int>(knot_steps.size()); }
    double knot_time(int k) const { return time(knot_steps[static_cast<std::size_t>(k)]); }

    /// Maps a time to the nearest step index; rejects off-grid times.
    int step_of(double t, double tol = 1e-9) const {
        const int k = static_cast<int>(std::lround(t / dt));
        if (k < 0 || k > n_steps || std::abs(t - k * dt) > tol)
            throw ValidationError("time " + std::to_string(t) + " is not a grid node");
        return k;
    }

    void validate() const {
        if (dt <= 0.0) throw ValidationError("TimeGrid: dt must be positive");
        if (n_steps <= 0) throw ValidationError("TimeGrid: no steps");
        int prev = 0;
        for (int s : knot_steps) {
            if (s <= prev || s > n_steps)
                throw ValidationError("TimeGrid: knot steps must be strictly increasing in (0, n_steps]");
            prev = s;
        }
        if (knot_steps.empty()) throw ValidationError("TimeGrid: needs at least one knot");
    }
};

/// Grid with knots every `steps_per_knot` steps up to `n_steps`.
inline TimeGrid make_uniform_grid(double dt, int n_steps, int steps_per_knot) {
    TimeGrid g;
    g.dt = dt;
    g.n_steps = n_steps;
    for (int s = steps_per_knot; s <= n_steps; s += steps_per_knot) g.knot_steps.push_back(s);
    if (g.knot_steps.empty() || g.knot_steps.back() != n_steps) g.knot_steps.push_back(n_steps);
    g.validate();
    return g;
}

} // namespace lsv
