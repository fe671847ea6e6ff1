#pragma once

#include <Eigen/Core>
#include <vector>

#include "lsv/discount_curve.hpp"
#include "lsv/interpolation.hpp"

namespace lsv {

/// One quoted smile: strikes ascending, implied Black vols.
struct VolSlice {
    double maturity = 0.0;
    Eigen::ArrayXd strikes;
    Eigen::ArrayXd vols;
};

/// Per-maturity total-variance smile in SVI form
///   w(k) = a + b (rho (k - m) + sqrt((k - m)^2 + sigma^2)),
/// k = log-moneyness against the maturity forward.
/// Fields map to (level, angle, skew, shift, curvature).
struct SviSlice {
    double maturity = 0.0;
    double a = 0.0;
    double b = 0.0;
    double rho = 0.0;
    double m = 0.0;
    double sigma = 0.1;

    double total_var(double k) const;
    double dk(double k) const;
    double dk2(double k) const;
};

struct SyntheticSurfaceSpec {
    double spot = 100.0;
    std::vector<SviSlice> slices;  // maturities strictly increasing
    // export grid in log-moneyness
    double k_min = -0.8;
    double k_max = 0.8;
    int n_strikes = 65;
};

/// Implied-vol surface: per-slice monotone-cubic total variance in
/// log-moneyness, linear in maturity at fixed log-moneyness, flat vols
/// outside the quoted strike range.  Immutable after construction.
class ImpliedVolSurface {
public:
    ImpliedVolSurface(double spot, DiscountCurve curve, std::vector<VolSlice> slices);

    double spot() const { return spot_; }
    const DiscountCurve& curve() const { return curve_; }
    double forward(double maturity) const { return spot_ / curve_.zcb(maturity); }
    const std::vector<VolSlice>& slices() const { return slices_; }
    double max_maturity() const { return slices_.back().maturity; }

    double total_var(double strike, double maturity) const;
    double vol(double strike, double maturity) const;
    /// Discounted Black call consistent with the interpolated smile.
    double call(double strike, double maturity) const;

    struct VarJet {
        double w;        // total variance
        double dk;       // d w / d log-moneyness
        double dk2;
        double dt;       // right-sided slope in maturity at fixed log-moneyness
    };
    VarJet var_jet(double strike, double maturity) const;

private:
    void validate() const;
    // per-slice w and k-derivatives at fixed log-moneyness
    void slice_var(int slice, double k, double& w, double& wk, double& wkk) const;

    double spot_ = 0.0;
    DiscountCurve curve_;
    std::vector<VolSlice> slices_;
    std::vector<PchipSpline> w_of_k_;  // per slice
    std::vector<double> forwards_;
};

/// Deterministic synthetic surface from an SVI spec; throws ValidationError
/// when a slice violates the numeric density/calendar constraints.
ImpliedVolSurface synthesize_surface(const SyntheticSurfaceSpec& spec, const DiscountCurve& curve);

/// Static no-arbitrage scan used by synthesize_surface; exposed for tests.
void check_svi_density(const SviSlice& s);

} // namespace lsv
