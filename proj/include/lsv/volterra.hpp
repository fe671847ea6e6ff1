#pragma once

#include <Eigen/Core>

namespace lsv {

/// Exact-grid factorization of the tempered Volterra Gaussian
///   G_i = ν √(2H) ∫_0^{t_i} (t_i - s)^{H-1/2} e^{-β(t_i - s)} dZ_s
/// on the uniform grid t_i = i·dt:
///
///   G_i = Σ_{k≤i} load_z(i,k) ζ_k + Σ_{m≤i} load_res(i,m) w_m,
///
/// ζ_k = ΔZ_k/√dt the standardized driver increments, w_m auxiliary i.i.d.
/// normals carrying the within-interval information orthogonal to the
/// increments.  Both loading matrices are lower triangular, so the
/// construction is adapted and the conditional law of G_i given everything
/// generated through step i-1 is N(past part, nu_tilde[i-1]).
struct VolterraFactor {
    Eigen::MatrixXd load_z;    // n x n lower triangular
    Eigen::MatrixXd load_res;  // n x n lower triangular
    Eigen::ArrayXd var_g;      // Var(G_i), i = 1..n
    Eigen::ArrayXd nu_tilde;   // one-step conditional variance of G_i
    Eigen::ArrayXd g_diag;     // load_z(i,i): innovation loading on ζ_i
};

VolterraFactor build_volterra_factor(double hurst, double beta, double nu, double dt, int n_steps);

/// ∫_{t_{k-1}}^{t_k} (t_i - s)^{H-1/2} e^{-β(t_i - s)} ds on the uniform grid
/// (depends on the lag i-k only); exposed for the quadrature-oracle tests.
double volterra_increment_integral(double hurst, double beta, double dt, int lag);

/// Cov(G_i, G_j)/ν² for the unit-ν kernel; exposed for the oracle tests.
double volterra_cov_entry(double hurst, double beta, double dt, int i, int j);

} // namespace lsv
