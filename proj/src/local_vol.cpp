#include "lsv/local_vol.hpp"

#include <cmath>
#include <sstream>

#include "lsv/black.hpp"
#include "lsv/errors.hpp"

namespace lsv {

CallDerivatives call_price_derivatives(const ImpliedVolSurface& surface, double strike,
                                       double maturity) {
    const auto& curve = surface.curve();
    const double df = curve.zcb(maturity);
    const double fwd = surface.forward(maturity);
    const double rbar = curve.mean_short_rate(maturity);
    const auto jet = surface.var_jet(strike, maturity);

    const double s = std::sqrt(jet.w);
    const double k = std::log(strike / fwd);
    const double d1 = -k / s + 0.5 * s;
    const double d2 = d1 - s;
    const double undisc = fwd * norm_cdf(d1) - strike * norm_cdf(d2);
    const double dBdw = fwd * norm_pdf(d1) / (2.0 * s);

    CallDerivatives out;
    out.price = df * undisc;
    out.dK = df * (-norm_cdf(d2) + norm_pdf(d2) * jet.dk / (2.0 * s));

    const double half_kwk_w = k * jet.dk / (2.0 * jet.w);
    const double g = (1.0 - half_kwk_w) * (1.0 - half_kwk_w) -
                     0.25 * jet.dk * jet.dk * (1.0 / jet.w + 0.25) + 0.5 * jet.dk2;
    double d2K = df * norm_pdf(d2) * g / (strike * s);
    const double floor = 1e-10 / surface.spot();
    if (d2K < floor) {
        d2K = floor;
        out.floored = true;
    }
    out.dK2 = d2K;

    // dC/dT at fixed strike: discount decay + forward drift + total-variance
    // slope, with the log-moneyness drift dk/dT = -rbar.
    out.dT = -rbar * out.price + df * (norm_cdf(d1) * fwd * rbar + dBdw * (jet.dt - jet.dk * rbar));
    return out;
}

double dupire_local_vol(const ImpliedVolSurface& surface, double strike, double maturity,
                        bool* floored) {
    const auto der = call_price_derivatives(surface, strike, maturity);
    if (floored) *floored = der.floored;
    const double rbar = surface.curve().mean_short_rate(maturity);
    const double num = der.dT + strike * rbar * der.dK;
    if (!(num > 0.0)) {
        std::ostringstream os;
        os << "dupire_local_vol: non-positive numerator at (K=" << strike << ", T=" << maturity
           << "), num=" << num;
        throw ValidationError(os.str());
    }
    const double var = num / (0.5 * strike * strike * der.dK2);
    return std::sqrt(var);
}

LocalVolSurface LocalVolSurface::from_surface(const ImpliedVolSurface& surface,
                                              const Eigen::ArrayXd& maturities,
                                              const Eigen::ArrayXd& strikes) {
    LocalVolSurface lv;
    lv.maturities = maturities;
    lv.strikes = strikes;
    lv.sigma_dup.resize(maturities.size(), strikes.size());
    for (Eigen::Index i = 0; i < maturities.size(); ++i)
        for (Eigen::Index j = 0; j < strikes.size(); ++j) {
            bool fl = false;
            lv.sigma_dup(i, j) = dupire_local_vol(surface, strikes[j], maturities[i], &fl);
            if (fl) ++lv.floored_cells;
            if (!std::isfinite(lv.sigma_dup(i, j)) || lv.sigma_dup(i, j) <= 0.0) {
                std::ostringstream os;
                os << "LocalVolSurface: invalid value at (T=" << maturities[i]
                   << ", K=" << strikes[j] << ")";
                throw ValidationError(os.str());
            }
        }
    return lv;
}

} // namespace lsv
