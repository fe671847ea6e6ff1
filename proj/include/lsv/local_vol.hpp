#pragma once

#include <Eigen/Core>

#include "lsv/vol_surface.hpp"

namespace lsv {

struct CallDerivatives {
    double price = 0.0;
    double dT = 0.0;
    double dK = 0.0;
    double dK2 = 0.0;      // after flooring
    bool floored = false;  // dK2 hit the floor
};

/// Price and partials of the discounted call implied by the surface.
/// dK/dK2 are analytic through the total-variance interpolation; dT uses the
/// right-sided total-variance slope in maturity.
CallDerivatives call_price_derivatives(const ImpliedVolSurface& surface, double strike,
                                       double maturity);

/// Dupire local volatility
///   sigma^2 = (dC/dT + K rbar(T) dC/dK) / (1/2 K^2 d2C/dK2)
/// with the strike-convexity denominator floored at 1e-10 / spot.
/// Throws ValidationError when the numerator is non-positive.
double dupire_local_vol(const ImpliedVolSurface& surface, double strike, double maturity,
                        bool* floored = nullptr);

/// Dupire values sampled on a fixed grid.
struct LocalVolSurface {
    Eigen::ArrayXd maturities;
    Eigen::ArrayXd strikes;
    Eigen::MatrixXd sigma_dup;  // (maturity, strike)
    int floored_cells = 0;

    static LocalVolSurface from_surface(const ImpliedVolSurface& surface,
                                        const Eigen::ArrayXd& maturities,
                                        const Eigen::ArrayXd& strikes);
};

} // namespace lsv
