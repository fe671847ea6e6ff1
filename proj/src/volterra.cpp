#include "lsv/volterra.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <vector>

#include "lsv/errors.hpp"
#include "lsv/quadrature.hpp"

namespace lsv {

namespace {

// Single-interval kernel integrals on the uniform grid.  The integrable
// singularity u^{H-1/2} at u=0 is removed by the substitution u = τ^p with
// p = 1/(H+1/2) (single power) or p = 1/(2H) (squared kernel), after which
// one fixed Gauss-Legendre rule reaches near machine accuracy.

// Q(lag) = ∫_0^dt (lag·dt + u)^{H-1/2} e^{-β(lag·dt + u)} du
double kernel_increment(double H, double beta, double dt, int lag, const GaussLegendre& gl) {
    if (lag == 0) {
        const double p = 1.0 / (H + 0.5);
        const double upper = std::pow(dt, H + 0.5);
        return p * gl.integrate_panels(
                       [&](double tau) { return std::exp(-beta * std::pow(tau, p)); }, 0.0, upper, 4);
    }
    const double off = lag * dt;
    return gl.integrate(
        [&](double u) { return std::pow(off + u, H - 0.5) * std::exp(-beta * (off + u)); }, 0.0, dt);
}

// E(p,q) = ∫_0^dt (p·dt+u)^{H-1/2} (q·dt+u)^{H-1/2} e^{-β((p+q)·dt + 2u)} du, p >= q
double kernel_product(double H, double beta, double dt, int p, int q, const GaussLegendre& gl) {
    if (q == 0 && p == 0) {
        const double pw = 1.0 / (2.0 * H);
        const double upper = std::pow(dt, 2.0 * H);
        return (0.5 / H) *
               gl.integrate_panels(
                   [&](double tau) { return std::exp(-2.0 * beta * std::pow(tau, pw)); }, 0.0, upper, 4);
    }
    if (q == 0) {
        const double pw = 1.0 / (H + 0.5);
        const double off = p * dt;
        const double upper = std::pow(dt, H + 0.5);
        return pw * gl.integrate_panels(
                        [&](double tau) {
                            const double u = std::pow(tau, pw);
                            return std::pow(off + u, H - 0.5) * std::exp(-beta * (off + 2.0 * u));
                        },
                        0.0, upper, 4);
    }
    const double offp = p * dt, offq = q * dt;
    return gl.integrate(
        [&](double u) {
            return std::pow(offp + u, H - 0.5) * std::pow(offq + u, H - 0.5) *
                   std::exp(-beta * (offp + offq + 2.0 * u));
        },
        0.0, dt);
}

} // namespace

double volterra_increment_integral(double hurst, double beta, double dt, int lag) {
    const GaussLegendre gl(48);
    return kernel_increment(hurst, beta, dt, lag, gl);
}

double volterra_cov_entry(double hurst, double beta, double dt, int i, int j) {
    if (i < j) std::swap(i, j);
    const GaussLegendre gl(48);
    double acc = 0.0;
    for (int k = 1; k <= j; ++k) acc += kernel_product(hurst, beta, dt, i - k, j - k, gl);
    return 2.0 * hurst * acc;
}

VolterraFactor build_volterra_factor(double hurst, double beta, double nu, double dt, int n_steps) {
    if (!(hurst > 0.0) || !(hurst <= 0.5)) throw ValidationError("Volterra: H must be in (0, 1/2]");
    if (!(beta >= 0.0) || !(nu > 0.0) || !(dt > 0.0) || n_steps < 1)
        throw ValidationError("Volterra: bad parameters");

    const int n = n_steps;
    const GaussLegendre gl(48);

    // Increment loadings: load_z(i,k) = ν √(2H) Q(i-k) / √dt, lag-stationary.
    std::vector<double> q(static_cast<std::size_t>(n));
    for (int lag = 0; lag < n; ++lag)
        q[static_cast<std::size_t>(lag)] = kernel_increment(hurst, beta, dt, lag, gl);

    const double scale = nu * std::sqrt(2.0 * hurst);
    VolterraFactor f;
    f.load_z = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= i; ++k)
            f.load_z(i - 1, k - 1) = scale * q[static_cast<std::size_t>(i - k)] / std::sqrt(dt);

    // Covariance of G by the two-lag recursion c_{i,j} = c_{i-1,j-1} + 2H E(i-1, j-1).
    std::vector<std::vector<double>> eprod(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
        eprod[static_cast<std::size_t>(p)].resize(static_cast<std::size_t>(p) + 1);
        for (int qq = 0; qq <= p; ++qq)
            eprod[static_cast<std::size_t>(p)][static_cast<std::size_t>(qq)] =
                kernel_product(hurst, beta, dt, p, qq, gl);
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    const double s2 = nu * nu * 2.0 * hurst;
    for (int delta = 0; delta < n; ++delta) {
        double c = 0.0;
        for (int j = 1; j + delta <= n; ++j) {
            c += s2 * eprod[static_cast<std::size_t>(j - 1 + delta)][static_cast<std::size_t>(j - 1)];
            cov(j - 1 + delta, j - 1) = c;
            cov(j - 1, j - 1 + delta) = c;
        }
    }

    // Residual covariance: what the increments do not explain.
    Eigen::MatrixXd res = cov;
    res.selfadjointView<Eigen::Lower>().rankUpdate(f.load_z, -1.0);
    res = res.selfadjointView<Eigen::Lower>();

    Eigen::LLT<Eigen::MatrixXd> llt(res);
    if (llt.info() != Eigen::Success) {
        const double max_diag = res.diagonal().maxCoeff();
        Eigen::MatrixXd jittered = res + 1e-13 * max_diag * Eigen::MatrixXd::Identity(n, n);
        llt.compute(jittered);
        if (llt.info() != Eigen::Success) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res, Eigen::EigenvaluesOnly);
            std::ostringstream os;
            os << "Volterra: residual covariance factorization failed (min eigenvalue "
               << es.eigenvalues().minCoeff() << ")";
            throw Error(os.str());
        }
    }
    f.load_res = llt.matrixL();

    f.var_g = cov.diagonal().array();
    f.g_diag.resize(n);
    f.nu_tilde.resize(n);
    for (int i = 0; i < n; ++i) {
        f.g_diag[i] = f.load_z(i, i);
        f.nu_tilde[i] = f.g_diag[i] * f.g_diag[i] + f.load_res(i, i) * f.load_res(i, i);
    }
    return f;
}

} // namespace lsv
