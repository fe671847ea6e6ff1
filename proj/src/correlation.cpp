#include "lsv/correlation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <sstream>

#include "lsv/errors.hpp"

namespace lsv {

Eigen::MatrixXd CorrelationStructure::full() const {
    const int m = n();
    Eigen::MatrixXd f(m + 1, m + 1);
    f(0, 0) = 1.0;
    f.block(0, 1, 1, m) = rho_wz.transpose();
    f.block(1, 0, m, 1) = rho_wz;
    f.block(1, 1, m, m) = sigma_z;
    return f;
}

CorrelationStructure CorrelationStructure::make(Eigen::VectorXd rho_wz, Eigen::MatrixXd sigma_z) {
    CorrelationStructure cs;
    cs.rho_wz = std::move(rho_wz);
    cs.sigma_z = std::move(sigma_z);
    const int m = cs.n();
    if (cs.sigma_z.rows() != m || cs.sigma_z.cols() != m || m < 1)
        throw ValidationError("CorrelationStructure: dimension mismatch");
    for (int i = 0; i < m; ++i) {
        if (std::abs(cs.sigma_z(i, i) - 1.0) > 1e-12)
            throw ValidationError("CorrelationStructure: Σ_Z must have unit diagonal");
        for (int j = 0; j < i; ++j)
            if (std::abs(cs.sigma_z(i, j) - cs.sigma_z(j, i)) > 1e-12)
                throw ValidationError("CorrelationStructure: Σ_Z must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cs.full(), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-12) {
        std::ostringstream os;
        os << "CorrelationStructure: Σ not positive semi-definite (min eigenvalue " << min_eig << ")";
        throw ValidationError(os.str());
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cs.sigma_z);
    if (llt.info() != Eigen::Success) {
        // Σ_Z may be singular-PSD; regularize minimally for the Cholesky cache.
        Eigen::MatrixXd jittered = cs.sigma_z + 1e-13 * Eigen::MatrixXd::Identity(m, m);
        llt.compute(jittered);
        if (llt.info() != Eigen::Success)
            throw ValidationError("CorrelationStructure: Σ_Z Cholesky failed");
    }
    cs.chol_z = llt.matrixL();
    cs.proj = llt.solve(cs.rho_wz);
    cs.rho_hat2 = cs.rho_wz.dot(cs.proj);
    if (cs.rho_hat2 < 0.0 || cs.rho_hat2 > 1.0 + 1e-12)
        throw ValidationError("CorrelationStructure: ρ̂² outside [0, 1]");
    cs.rho_hat2 = std::min(cs.rho_hat2, 1.0);
    return cs;
}

} // namespace lsv
