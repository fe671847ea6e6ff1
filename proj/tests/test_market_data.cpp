#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lsv/black.hpp"
#include "lsv/csv.hpp"
#include "lsv/errors.hpp"
#include "lsv/local_vol.hpp"
#include "lsv/model.hpp"
#include "lsv/vol_surface.hpp"

using namespace lsv;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

// skewed but arbitrage-free SVI fixture
SyntheticSurfaceSpec skewed_spec(double spot = 100.0) {
    SyntheticSurfaceSpec spec;
    spec.spot = spot;
    spec.k_min = -0.9;
    spec.k_max = 0.9;
    spec.n_strikes = 61;
    for (int mth = 1; mth <= 26; ++mth) {
        const double t = mth / 12.0;
        const double atm = 0.19 + 0.012 * std::exp(-1.2 * t);
        const double skew = -0.09 / (1.0 + 0.5 * t);
        SviSlice s;
        s.maturity = t;
        s.sigma = 0.35;
        s.rho = -0.6;
        s.m = 0.0;
        s.b = 2.0 * atm * t * std::abs(skew) / std::abs(s.rho);
        s.a = atm * atm * t - s.b * s.sigma;
        spec.slices.push_back(s);
    }
    return spec;
}

SyntheticSurfaceSpec flat_spec(double vol, double spot = 100.0) {
    SyntheticSurfaceSpec spec;
    spec.spot = spot;
    spec.k_min = -0.9;
    spec.k_max = 0.9;
    spec.n_strikes = 41;
    for (int mth = 1; mth <= 26; ++mth) {
        const double t = mth / 12.0;
        SviSlice s;
        s.maturity = t;
        s.a = vol * vol * t;
        s.b = 0.0;
        s.rho = 0.0;
        s.sigma = 0.1;
        spec.slices.push_back(s);
    }
    return spec;
}

} // namespace

TEST_CASE("discount curve basics") {
    auto flat = DiscountCurve::flat(0.015, 10.0);
    CHECK(flat.zcb(0.0) == 1.0);
    CHECK(flat.zcb(2.0) == doctest::Approx(std::exp(-0.03)).epsilon(1e-13));
    CHECK(flat.mean_short_rate(1.3) == doctest::Approx(0.015).epsilon(1e-9));

    // unit curve: zero rates
    Eigen::ArrayXd t(3), z(3);
    t << 1.0, 2.0, 3.0;
    z << 1.0, 1.0, 1.0;
    DiscountCurve unit(t, z);
    CHECK(unit.mean_short_rate(1.5) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(DiscountCurve(t, (Eigen::ArrayXd(3) << 1.0, -0.5, 1.0).finished()),
                    ValidationError);
}

TEST_CASE("mean short rate matches the analytic vasicek forward curve") {
    VasicekParams p;  // kappa=1, sigma=0.005, r0=0.015
    const int n = 252 * 3;
    Eigen::ArrayXd t(n), z(n);
    for (int i = 1; i <= n; ++i) {
        t[i - 1] = i / 252.0;
        z[i - 1] = p.zcb(t[i - 1]);
    }
    DiscountCurve curve(t, z);
    for (double tt : {0.3, 0.5, 1.0, 1.7, 2.5})
        CHECK(curve.mean_short_rate(tt) == doctest::Approx(p.forward_rate(tt)).epsilon(1e-6));
}

TEST_CASE("mean short rate integrates back to the discount factor") {
    VasicekParams p;
    const int n = 252 * 3;
    Eigen::ArrayXd t(n), z(n);
    for (int i = 1; i <= n; ++i) {
        t[i - 1] = i / 252.0;
        z[i - 1] = p.zcb(t[i - 1]);
    }
    DiscountCurve curve(t, z);
    // segment-aware midpoint quadrature: r̄ is piecewise constant between tenors
    for (double horizon : {1.0, 2.0}) {
        double acc = 0.0;
        const int segs = static_cast<int>(std::lround(horizon * 252));
        for (int k = 0; k < segs; ++k) {
            const double mid = (k + 0.5) / 252.0;
            acc += curve.mean_short_rate(mid) / 252.0;
        }
        CHECK(std::abs(acc - (-std::log(curve.zcb(horizon)))) < 1e-8);
    }
}

TEST_CASE("surface csv loads a flat one-slice quote set") {
    const std::string path = tmp_path("flat_surface.csv");
    {
        std::ofstream out(path);
        out << "T,K,iv\n1.0,90,0.2\n1.0,100,0.2\n1.0,110,0.2\n";
    }
    auto surface = load_surface_csv(path, 100.0, DiscountCurve::flat(0.0));
    CHECK(surface.slices().size() == 1);
    CHECK(surface.vol(95.0, 1.0) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("surface csv rejects negative vols") {
    const std::string path = tmp_path("bad_surface.csv");
    {
        std::ofstream out(path);
        out << "T,K,iv\n1.0,90,0.2\n1.0,100,-0.2\n1.0,110,0.2\n";
    }
    CHECK_THROWS_AS(load_surface_csv(path, 100.0, DiscountCurve::flat(0.0)), ValidationError);
}

TEST_CASE("surface csv rejects wrong header") {
    const std::string path = tmp_path("hdr_surface.csv");
    {
        std::ofstream out(path);
        out << "T,K,vol\n1.0,90,0.2\n";
    }
    CHECK_THROWS_AS(load_surface_csv(path, 100.0, DiscountCurve::flat(0.0)), ValidationError);
}

TEST_CASE("synthetic export round-trips through the writer") {
    auto curve = DiscountCurve::flat(0.015, 5.0);
    auto surface = synthesize_surface(skewed_spec(), curve);
    const std::string path = tmp_path("svi_roundtrip.csv");
    write_surface_csv(path, surface);
    auto back = load_surface_csv(path, 100.0, curve);
    REQUIRE(back.slices().size() == surface.slices().size());
    for (std::size_t i = 0; i < surface.slices().size(); ++i) {
        const auto& a = surface.slices()[i];
        const auto& b = back.slices()[i];
        for (Eigen::Index j = 0; j < a.strikes.size(); ++j) {
            CHECK(std::abs(a.strikes[j] - b.strikes[j]) < 1e-12);
            CHECK(std::abs(a.vols[j] - b.vols[j]) < 1e-12);
        }
    }
}

TEST_CASE("degenerate svi parameterization gives a flat surface") {
    auto surface = synthesize_surface(flat_spec(0.2), DiscountCurve::flat(0.0));
    for (double t : {0.25, 0.8, 1.5})
        for (double k : {70.0, 100.0, 140.0})
            CHECK(surface.vol(k, t) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("negative skew spec orders the smile") {
    auto surface = synthesize_surface(skewed_spec(), DiscountCurve::flat(0.015, 5.0));
    for (const auto& s : surface.slices()) {
        // compare quoted vols at +-20% moneyness
        const double lo = surface.vol(80.0, s.maturity);
        const double hi = surface.vol(120.0, s.maturity);
        CHECK(lo > hi);
    }
}

TEST_CASE("butterfly prices are non-negative on a dense grid") {
    auto surface = synthesize_surface(skewed_spec(), DiscountCurve::flat(0.015, 5.0));
    for (double t : {1.0 / 12, 0.5, 1.0, 2.0}) {
        for (int i = 1; i < 160; ++i) {
            const double k0 = 55.0 + (i - 1) * 0.625;
            const double k1 = 55.0 + i * 0.625;
            const double k2 = 55.0 + (i + 1) * 0.625;
            const double fly =
                surface.call(k0, t) - 2.0 * surface.call(k1, t) + surface.call(k2, t);
            CHECK(fly > -1e-9 * 100.0);
        }
    }
}

TEST_CASE("svi density check rejects a concave smile") {
    SviSlice bad;
    bad.maturity = 1.0;
    bad.a = -0.2;
    bad.b = 0.9;
    bad.rho = 0.0;
    bad.sigma = 0.05;
    CHECK_THROWS_AS(check_svi_density(bad), ValidationError);
}

TEST_CASE("dupire on a flat surface with zero rates is the flat vol") {
    auto surface = synthesize_surface(flat_spec(0.2), DiscountCurve::flat(0.0));
    double lo = 1.0, hi = 0.0;
    for (double t : {0.1, 0.5, 1.0, 1.9})
        for (double k : {60.0, 85.0, 100.0, 130.0, 175.0}) {
            const double sd = dupire_local_vol(surface, k, t);
            lo = std::min(lo, sd);
            hi = std::max(hi, sd);
        }
    CHECK(std::abs(lo - 0.2) < 1e-10);
    CHECK(std::abs(hi - 0.2) < 1e-10);
}

TEST_CASE("dupire on a flat surface with a flat deterministic rate is unchanged") {
    auto surface = synthesize_surface(flat_spec(0.2), DiscountCurve::flat(0.015, 5.0));
    double lo = 1.0, hi = 0.0;
    for (double t : {0.1, 0.5, 1.0, 1.9})
        for (double k : {60.0, 85.0, 100.0, 130.0, 175.0}) {
            const double sd = dupire_local_vol(surface, k, t);
            lo = std::min(lo, sd);
            hi = std::max(hi, sd);
        }
    CHECK(std::abs(lo - 0.2) < 1e-10);
    CHECK(std::abs(hi - 0.2) < 1e-10);
}

TEST_CASE("dupire matches a finite-difference oracle on a skewed surface") {
    // oracle: brute finite differences of the surface's own call prices on a
    // grid 4x finer than anything the analytic path uses internally
    auto curve = DiscountCurve::flat(0.015, 5.0);
    auto surface = synthesize_surface(skewed_spec(), curve);
    for (double t : {0.25, 0.75, 1.5})
        for (double k : {80.0, 95.0, 105.0, 125.0}) {
            const double hk = 0.0025 * k;
            const double ht = 1e-4;
            const double c_t1 = surface.call(k, t + ht);
            const double c_t0 = surface.call(k, t - ht);
            const double c_k1 = surface.call(k + hk, t);
            const double c_k0 = surface.call(k - hk, t);
            const double c_00 = surface.call(k, t);
            const double d_t = (c_t1 - c_t0) / (2.0 * ht);
            const double d_k = (c_k1 - c_k0) / (2.0 * hk);
            const double d_kk = (c_k1 - 2.0 * c_00 + c_k0) / (hk * hk);
            const double rbar = curve.mean_short_rate(t);
            const double oracle = std::sqrt((d_t + k * rbar * d_k) / (0.5 * k * k * d_kk));
            const double sd = dupire_local_vol(surface, k, t);
            CHECK(sd == doctest::Approx(oracle).epsilon(5e-3));
        }
}

TEST_CASE("call price derivatives match black analytics on a flat smile") {
    auto curve = DiscountCurve::flat(0.015, 5.0);
    auto surface = synthesize_surface(flat_spec(0.2), curve);
    const double t = 1.0;
    const double fwd = surface.forward(t);
    const double k = fwd;  // at the money
    const auto der = call_price_derivatives(surface, k, t);
    const double df = curve.zcb(t);
    const double s = 0.2 * std::sqrt(t);
    const double d2 = -0.5 * s;
    // dual gamma of the Black formula
    const double gamma_k = df * norm_pdf(d2) / (k * s);
    CHECK(der.dK2 == doctest::Approx(gamma_k).epsilon(1e-6));
    CHECK(der.price == doctest::Approx(df * black_call_w(fwd, k, 0.04)).epsilon(1e-12));
}

TEST_CASE("call price derivatives agree with bump-and-reprice") {
    auto surface = synthesize_surface(skewed_spec(), DiscountCurve::flat(0.015, 5.0));
    for (double t : {0.5, 1.25})
        for (double k : {85.0, 100.0, 118.0}) {
            const auto der = call_price_derivatives(surface, k, t);
            const double hk = 1e-3 * k;
            const double fd_k =
                (surface.call(k + hk, t) - surface.call(k - hk, t)) / (2.0 * hk);
            const double fd_kk = (surface.call(k + hk, t) - 2.0 * surface.call(k, t) +
                                  surface.call(k - hk, t)) /
                                 (hk * hk);
            const double ht = 1e-5;
            const double fd_t = (surface.call(k, t + ht) - surface.call(k, t - ht)) / (2.0 * ht);
            CHECK(der.dK == doctest::Approx(fd_k).epsilon(1e-4));
            CHECK(der.dK2 == doctest::Approx(fd_kk).epsilon(1e-4));
            CHECK(der.dT == doctest::Approx(fd_t).epsilon(1e-4));
        }
}

TEST_CASE("deep strike slope bounds and convexity") {
    auto curve = DiscountCurve::flat(0.015, 5.0);
    auto surface = synthesize_surface(flat_spec(0.2), curve);
    const double t = 1.0;
    const double df = curve.zcb(t);
    double prev_slope = -df;
    for (double k = 150.0; k <= 240.0; k += 5.0) {
        const auto der = call_price_derivatives(surface, k, t);
        CHECK(der.dK <= 1e-12);
        CHECK(der.dK >= -df - 1e-12);
        CHECK(der.dK >= prev_slope - 1e-10);  // slopes non-decreasing: convex
        prev_slope = der.dK;
    }
}

TEST_CASE("strike convexity holds across the quoted grid") {
    auto surface = synthesize_surface(skewed_spec(), DiscountCurve::flat(0.015, 5.0));
    for (const auto& s : surface.slices())
        for (Eigen::Index j = 0; j < s.strikes.size(); j += 4)
            CHECK(call_price_derivatives(surface, s.strikes[j], s.maturity).dK2 >= -1e-12);
}

TEST_CASE("local vol surface sampling validates positivity") {
    auto surface = synthesize_surface(skewed_spec(), DiscountCurve::flat(0.015, 5.0));
    Eigen::ArrayXd mats(3), ks(5);
    mats << 0.25, 1.0, 2.0;
    ks << 70.0, 85.0, 100.0, 120.0, 150.0;
    const auto lv = LocalVolSurface::from_surface(surface, mats, ks);
    CHECK((lv.sigma_dup.array() > 0.05).all());
    CHECK((lv.sigma_dup.array() < 1.0).all());
}
