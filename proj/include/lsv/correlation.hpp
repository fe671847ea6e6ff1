#pragma once

#include <Eigen/Core>

namespace lsv {

/// Correlation block of the (n+1)-dimensional driver (W, Z): spot driver W
/// against the n-dimensional block Z driving variance and rates.
///
/// Caches the projection vector Σ_Z^{-1} ρ_WZ and ρ̂² = ρ_WZᵀ Σ_Z^{-1} ρ_WZ,
/// the ingredients of the parallel component W^|| = ρ_WZᵀ Σ_Z^{-1} Z.
struct CorrelationStructure {
    Eigen::VectorXd rho_wz;   // n
    Eigen::MatrixXd sigma_z;  // n x n
    Eigen::VectorXd proj;     // Σ_Z^{-1} ρ_WZ
    Eigen::MatrixXd chol_z;   // lower Cholesky of Σ_Z
    double rho_hat2 = 0.0;

    int n() const { return static_cast<int>(rho_wz.size()); }

    /// Full (n+1)x(n+1) matrix [[1, ρᵀ], [ρ, Σ_Z]].
    Eigen::MatrixXd full() const;

    /// Validates symmetry, unit diagonal, positive semi-definiteness
    /// (eigenvalue tolerance -1e-12) and ρ̂² ∈ [0, 1]; caches projections.
    static CorrelationStructure make(Eigen::VectorXd rho_wz, Eigen::MatrixXd sigma_z);
};

} // namespace lsv
