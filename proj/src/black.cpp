#include "lsv/black.hpp"

#include <algorithm>

#include "lsv/errors.hpp"

namespace lsv {

double implied_vol_black(double price, double forward, double strike, double expiry,
                         double discount, double tol) {
    if (forward <= 0.0 || strike <= 0.0 || expiry <= 0.0 || discount <= 0.0)
        throw ValidationError("implied_vol_black: invalid market inputs");
    const double intrinsic = discount * std::max(forward - strike, 0.0);
    const double upper = discount * forward;
    if (!(price > intrinsic) || !(price < upper))
        throw ValidationError("implied_vol_black: price outside static no-arbitrage bounds");

    double lo = 1e-9, hi = 6.0;
    // Grow the bracket if the quote is extreme (should not happen in practice).
    while (black_call(forward, strike, hi, expiry, discount) < price && hi < 64.0) hi *= 2.0;

    // Newton inside a maintained bracket; the bracket width is the
    // convergence criterion, so flat-vega regions cannot stall the root.
    double sigma = 0.25;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double f = black_call(forward, strike, sigma, expiry, discount) - price;
        if (f > 0.0)
            hi = sigma;
        else
            lo = sigma;
        const double vega = black_vega(forward, strike, sigma, expiry, discount);
        double next = (vega > 1e-14) ? sigma - f / vega : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        sigma = next;
    }
    return 0.5 * (lo + hi);
}

} // namespace lsv
