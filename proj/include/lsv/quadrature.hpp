#pragma once

#include <Eigen/Core>
#include <functional>

namespace lsv {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;

    explicit GaussLegendre(int n);

    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < nodes.size(); ++i)
            acc += weights[i] * f(mid + half * nodes[i]);
        return acc * half;
    }

    /// Composite rule over `panels` equal subintervals of [a, b].
    template <class F>
    double integrate_panels(F&& f, double a, double b, int panels) const {
        double acc = 0.0;
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) acc += integrate(f, a + p * h, a + (p + 1) * h);
        return acc;
    }
};

/// Gauss-Hermite rule for ∫ f(x) e^{-x²} dx (physicists' weight), via
/// Golub-Welsch on the Jacobi matrix.
struct GaussHermite {
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;

    explicit GaussHermite(int n);

    /// E[f(Z)] for Z ~ N(mean, var).
    template <class F>
    double gaussian_expectation(F&& f, double mean, double sd) const {
        constexpr double inv_sqrt_pi = 0.564189583547756286948079451561;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < nodes.size(); ++i)
            acc += weights[i] * f(mean + 1.4142135623730950488 * sd * nodes[i]);
        return acc * inv_sqrt_pi;
    }
};

/// Adaptive Simpson on [a, b]; test-oracle quality, not performance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40);

} // namespace lsv
