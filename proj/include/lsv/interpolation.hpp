#pragma once

#include <Eigen/Core>

namespace lsv {

enum class Extrapolation { Flat, Linear };

/// Shape-preserving piecewise-cubic Hermite interpolant (Fritsch-Carlson
/// slopes, matlab-pchip endpoint rule).  No overshoot between nodes, C^1,
/// piecewise-defined second derivative.
class PchipSpline {
public:
    PchipSpline() = default;
    PchipSpline(Eigen::ArrayXd x, Eigen::ArrayXd y, Extrapolation extrap = Extrapolation::Flat);

    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    double x_min() const { return x_[0]; }
    double x_max() const { return x_[x_.size() - 1]; }

private:
    Eigen::Index interval(double x) const;

    Eigen::ArrayXd x_, y_, slope_;
    Extrapolation extrap_ = Extrapolation::Flat;
};

/// Natural cubic spline with flat value extrapolation outside the knot range.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(Eigen::ArrayXd x, Eigen::ArrayXd y);

    double operator()(double x) const;

    const Eigen::ArrayXd& knots() const { return x_; }
    const Eigen::ArrayXd& values() const { return y_; }

private:
    Eigen::ArrayXd x_, y_, m_;  // m_: second derivatives at knots
};

} // namespace lsv
