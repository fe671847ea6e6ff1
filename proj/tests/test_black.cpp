#include <doctest.h>

#include <cmath>

#include "lsv/black.hpp"
#include "lsv/errors.hpp"

using namespace lsv;

namespace {

// bisection oracle, implementation-independent
double implied_vol_bisect(double price, double fwd, double strike, double expiry, double df) {
    double lo = 1e-9, hi = 6.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (black_call(fwd, strike, mid, expiry, df) < price ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("norm_cdf basics") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(norm_cdf(-8.0) > 0.0);
}

TEST_CASE("black price sanity") {
    // zero variance collapses to intrinsic
    CHECK(black_call_w(100.0, 90.0, 0.0) == 10.0);
    // put-call parity
    const double c = black_call(100.0, 110.0, 0.25, 1.0, 0.97);
    const double p = black_put(100.0, 110.0, 0.25, 1.0, 0.97);
    CHECK(c - p == doctest::Approx(0.97 * (100.0 - 110.0)).epsilon(1e-14));
    // vega matches finite difference
    const double h = 1e-6;
    const double fd = (black_call(100.0, 95.0, 0.2 + h, 2.0, 0.95) -
                       black_call(100.0, 95.0, 0.2 - h, 2.0, 0.95)) /
                      (2.0 * h);
    CHECK(black_vega(100.0, 95.0, 0.2, 2.0, 0.95) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("implied vol round trip at sigma=0.2") {
    const double price = black_call(100.0, 105.0, 0.2, 1.0, 0.98);
    const double iv = implied_vol_black(price, 100.0, 105.0, 1.0, 0.98);
    CHECK(std::abs(iv - 0.2) < 1e-10);
}

TEST_CASE("implied vol identity over the spec band") {
    for (double sigma = 0.01; sigma <= 2.0; sigma += 0.0711) {
        for (double mny : {0.7, 0.9, 1.0, 1.15, 1.4}) {
            const double price = black_call(100.0, 100.0 * mny, sigma, 0.75, 0.99);
            const double intrinsic = 0.99 * std::max(100.0 - 100.0 * mny, 0.0);
            // deep-ITM low-vol quotes collapse to intrinsic in double precision
            if (price - intrinsic < 1e-10 * 100.0) continue;
            const double iv = implied_vol_black(price, 100.0, 100.0 * mny, 0.75, 0.99);
            CHECK(std::abs(iv - sigma) < 1e-9);
        }
    }
}

TEST_CASE("implied vol rejects prices at or below intrinsic") {
    CHECK_THROWS_AS(implied_vol_black(0.98 * (100.0 - 90.0), 100.0, 90.0, 1.0, 0.98),
                    ValidationError);
    CHECK_THROWS_AS(implied_vol_black(0.0, 100.0, 110.0, 1.0, 0.98), ValidationError);
    CHECK_THROWS_AS(implied_vol_black(99.0, 100.0, 110.0, 1.0, 0.98), ValidationError);
}

TEST_CASE("newton agrees with bisection oracle") {
    for (double sigma : {0.05, 0.2, 0.6, 1.5}) {
        for (double mny : {0.8, 1.0, 1.25}) {
            // skip cells where vega is below double resolution: the price
            // carries no vol information there and no solver can do better
            if (black_vega(100.0, 100.0 * mny, sigma, 0.5, 0.97) < 1e-4) continue;
            const double price = black_call(100.0, 100.0 * mny, sigma, 0.5, 0.97);
            const double a = implied_vol_black(price, 100.0, 100.0 * mny, 0.5, 0.97);
            const double b = implied_vol_bisect(price, 100.0, 100.0 * mny, 0.5, 0.97);
            CHECK(std::abs(a - b) < 1e-9);
        }
    }
}
