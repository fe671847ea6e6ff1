#pragma once

#include <Eigen/Core>
#include <vector>

#include "lsv/interpolation.hpp"

namespace lsv {

/// Leverage function λ(x, t): piecewise constant in time between knots,
/// natural cubic spline in strike within [K_min, K_max], flat outside.
/// Slice j (set at knot time t_j) governs [t_j, t_{j+1}); slice 0 is the
/// initialization slice at t_0 = 0.
class LeverageSurface {
public:
    LeverageSurface() = default;
    LeverageSurface(Eigen::ArrayXd knot_times, Eigen::ArrayXd strikes);

    void set_slice(int index, const Eigen::ArrayXd& lambda);
    bool slice_set(int index) const { return set_[static_cast<std::size_t>(index)]; }
    const Eigen::ArrayXd& slice_values(int index) const;

    /// λ(spot, t): slice = last knot time <= t.
    double value(double spot, double t) const;

    int n_slices() const { return static_cast<int>(knot_times_.size()); }
    int slice_index(double t) const;
    const Eigen::ArrayXd& knot_times() const { return knot_times_; }
    const Eigen::ArrayXd& strikes() const { return strikes_; }

private:
    Eigen::ArrayXd knot_times_;  // ascending, starts at 0
    Eigen::ArrayXd strikes_;
    std::vector<CubicSpline> slices_;
    std::vector<Eigen::ArrayXd> values_;
    std::vector<bool> set_;
};

} // namespace lsv
