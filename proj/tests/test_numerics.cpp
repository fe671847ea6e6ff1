#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lsv/interpolation.hpp"
#include "lsv/quadrature.hpp"
#include "lsv/summation.hpp"

using namespace lsv;

TEST_CASE("deterministic_sum handles cancellation") {
    Eigen::ArrayXd v(3);
    v << 1e16, 1.0, -1e16;
    CHECK(deterministic_sum(v) == 1.0);

    Eigen::ArrayXd w(100000);
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = 1.0 / (1.0 + static_cast<double>(i));
    const double s = deterministic_sum(w);
    // compare against long-double reference
    long double ref = 0.0L;
    for (Eigen::Index i = 0; i < w.size(); ++i) ref += static_cast<long double>(w[i]);
    CHECK(std::abs(s - static_cast<double>(ref)) < 1e-12);
}

TEST_CASE("gauss-legendre integrates polynomials and smooth functions") {
    GaussLegendre gl(16);
    CHECK(gl.integrate([](double x) { return x * x * x * x * x * x; }, -1.0, 1.0) ==
          doctest::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(gl.integrate_panels([](double x) { return std::sin(x); }, 0.0, M_PI, 4) ==
          doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("gauss-hermite matches gaussian moments") {
    GaussHermite gh(32);
    CHECK(gh.weights.sum() == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
    const double ez2 = gh.gaussian_expectation([](double z) { return z * z; }, 0.0, 1.0);
    CHECK(ez2 == doctest::Approx(1.0).epsilon(1e-12));
    const double eexp = gh.gaussian_expectation([](double z) { return std::exp(z); }, 0.0, 1.0);
    CHECK(eexp == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
    const double shifted =
        gh.gaussian_expectation([](double z) { return std::exp(z); }, 0.3, 0.7);
    CHECK(shifted == doctest::Approx(std::exp(0.3 + 0.5 * 0.49)).epsilon(1e-12));
}

TEST_CASE("adaptive simpson") {
    CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 2.0, 1e-13) ==
          doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("pchip interpolates and preserves shape") {
    Eigen::ArrayXd x(5), y(5);
    x << 0.0, 1.0, 2.0, 3.5, 5.0;
    y << 1.0, 2.0, 4.0, 4.5, 4.6;
    PchipSpline p(x, y);
    for (Eigen::Index i = 0; i < x.size(); ++i) CHECK(p(x[i]) == doctest::Approx(y[i]).epsilon(1e-15));
    // monotone data: no overshoot anywhere
    for (int i = 0; i <= 500; ++i) {
        const double xx = 5.0 * i / 500.0;
        CHECK(p(xx) >= 1.0 - 1e-12);
        CHECK(p(xx) <= 4.6 + 1e-12);
    }
    // derivative consistent with finite differences
    for (double xx : {0.5, 1.7, 3.0, 4.2}) {
        const double h1 = 1e-6;
        const double fd = (p(xx + h1) - p(xx - h1)) / (2.0 * h1);
        CHECK(p.derivative(xx) == doctest::Approx(fd).epsilon(1e-6));
        const double h2 = 1e-4;  // second differences need a wider stencil for roundoff
        const double fd2 = (p(xx + h2) - 2.0 * p(xx) + p(xx - h2)) / (h2 * h2);
        CHECK(p.second_derivative(xx) == doctest::Approx(fd2).epsilon(1e-5));
    }
    // flat extrapolation
    CHECK(p(-1.0) == 1.0);
    CHECK(p(9.0) == 4.6);
    CHECK(p.derivative(-1.0) == 0.0);
}

TEST_CASE("natural cubic spline") {
    Eigen::ArrayXd x(4), y(4);
    x << 0.0, 1.0, 2.0, 3.0;
    y << 0.0, 1.0, 0.0, 1.0;
    CubicSpline s(x, y);
    for (Eigen::Index i = 0; i < x.size(); ++i) CHECK(s(x[i]) == doctest::Approx(y[i]).epsilon(1e-14));
    // natural boundary: curvature vanishes at the ends
    const double h = 1e-4;
    CHECK(std::abs(s(0.0) - 2.0 * s(h) + s(2 * h)) / (h * h) < 1e-2);
    // flat outside
    CHECK(s(-2.0) == 0.0);
    CHECK(s(5.0) == 1.0);
}
