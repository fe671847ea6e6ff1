#include "lsv/interpolation.hpp"

#include <cmath>

#include "lsv/errors.hpp"

namespace lsv {

namespace {

void check_grid(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
    if (x.size() != y.size() || x.size() < 1)
        throw ValidationError("interpolation: mismatched or empty grids");
    for (Eigen::Index i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw ValidationError("interpolation: abscissae must be strictly increasing");
}

} // namespace

PchipSpline::PchipSpline(Eigen::ArrayXd x, Eigen::ArrayXd y, Extrapolation extrap)
    : x_(std::move(x)), y_(std::move(y)), extrap_(extrap) {
    check_grid(x_, y_);
    const Eigen::Index n = x_.size();
    slope_.resize(n);
    if (n == 1) {
        slope_[0] = 0.0;
        return;
    }
    Eigen::ArrayXd h(n - 1), del(n - 1);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        del[k] = (y_[k + 1] - y_[k]) / h[k];
    }
    if (n == 2) {
        slope_[0] = slope_[1] = del[0];
        return;
    }
    for (Eigen::Index k = 1; k + 1 < n; ++k) {
        if (del[k - 1] * del[k] <= 0.0) {
            slope_[k] = 0.0;
        } else {
            const double w1 = 2.0 * h[k] + h[k - 1];
            const double w2 = h[k] + 2.0 * h[k - 1];
            slope_[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
        }
    }
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0)
            m = 0.0;
        else if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0))
            m = 3.0 * d0;
        return m;
    };
    slope_[0] = endpoint(h[0], h[1], del[0], del[1]);
    slope_[n - 1] = endpoint(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
}

Eigen::Index PchipSpline::interval(double x) const {
    Eigen::Index lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (x_[mid] <= x ? lo : hi) = mid;
    }
    return lo;
}

double PchipSpline::operator()(double x) const {
    const Eigen::Index n = x_.size();
    if (n == 1) return y_[0];
    if (x <= x_[0])
        return extrap_ == Extrapolation::Flat ? y_[0] : y_[0] + slope_[0] * (x - x_[0]);
    if (x >= x_[n - 1])
        return extrap_ == Extrapolation::Flat ? y_[n - 1] : y_[n - 1] + slope_[n - 1] * (x - x_[n - 1]);
    const Eigen::Index k = interval(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[k] + h10 * h * slope_[k] + h01 * y_[k + 1] + h11 * h * slope_[k + 1];
}

double PchipSpline::derivative(double x) const {
    const Eigen::Index n = x_.size();
    if (n == 1) return 0.0;
    if (x <= x_[0]) return extrap_ == Extrapolation::Flat ? 0.0 : slope_[0];
    if (x >= x_[n - 1]) return extrap_ == Extrapolation::Flat ? 0.0 : slope_[n - 1];
    const Eigen::Index k = interval(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t;
    const double g00 = (6 * t2 - 6 * t) / h, g10 = 3 * t2 - 4 * t + 1;
    const double g01 = (-6 * t2 + 6 * t) / h, g11 = 3 * t2 - 2 * t;
    return g00 * y_[k] + g10 * slope_[k] + g01 * y_[k + 1] + g11 * slope_[k + 1];
}

double PchipSpline::second_derivative(double x) const {
    const Eigen::Index n = x_.size();
    if (n == 1) return 0.0;
    if (x <= x_[0] || x >= x_[n - 1]) return 0.0;
    const Eigen::Index k = interval(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double q00 = (12 * t - 6) / (h * h), q10 = (6 * t - 4) / h;
    const double q01 = (-12 * t + 6) / (h * h), q11 = (6 * t - 2) / h;
    return q00 * y_[k] + q10 * slope_[k] + q01 * y_[k + 1] + q11 * slope_[k + 1];
}

CubicSpline::CubicSpline(Eigen::ArrayXd x, Eigen::ArrayXd y) : x_(std::move(x)), y_(std::move(y)) {
    check_grid(x_, y_);
    const Eigen::Index n = x_.size();
    m_ = Eigen::ArrayXd::Zero(n);
    if (n < 3) return;
    // Thomas solve of the natural-spline tridiagonal system.
    Eigen::ArrayXd diag(n), rhs(n), sub(n), sup(n);
    diag[0] = diag[n - 1] = 1.0;
    rhs[0] = rhs[n - 1] = 0.0;
    sub[0] = sup[0] = sub[n - 1] = sup[n - 1] = 0.0;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1];
        const double hr = x_[i + 1] - x_[i];
        sub[i] = hl / 6.0;
        diag[i] = (hl + hr) / 3.0;
        sup[i] = hr / 6.0;
        rhs[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
    }
    for (Eigen::Index i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m_[n - 1] = rhs[n - 1] / diag[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
}

double CubicSpline::operator()(double x) const {
    const Eigen::Index n = x_.size();
    if (n == 1) return y_[0];
    if (x <= x_[0]) return y_[0];
    if (x >= x_[n - 1]) return y_[n - 1];
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (x_[mid] <= x ? lo : hi) = mid;
    }
    const double h = x_[lo + 1] - x_[lo];
    const double a = (x_[lo + 1] - x) / h;
    const double b = (x - x_[lo]) / h;
    return a * y_[lo] + b * y_[lo + 1] +
           ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[lo + 1]) * h * h / 6.0;
}

} // namespace lsv
