#pragma once

#include <Eigen/Core>
#include <vector>

#include "lsv/calibration.hpp"
#include "lsv/engine.hpp"

namespace lsv {

struct VarianceStudyRow {
    double strike = 0.0;
    double var_exact = 0.0;
    double var_lognormal = 0.0;
    double var_kernel = 0.0;
    double mean_exact = 0.0;
    double mean_lognormal = 0.0;
    double mean_kernel = 0.0;
};

struct VarianceStudy {
    std::vector<VarianceStudyRow> rows;
    int replications = 0;
    double bandwidth = 0.0;
    double t = 0.0;
    bool has_lognormal = false;
};

/// Sample variance of the three conditional-expectation estimators across
/// independent replications of a fixed model/leverage/step fixture.
VarianceStudy estimator_variance_study(const HybridModel& model, const LeverageSurface& leverage,
                                       double spot0, const TimeGrid& grid,
                                       const std::vector<double>& strikes, int replications,
                                       Eigen::Index particles, std::uint64_t seed0,
                                       double bandwidth_mult = 1.0);

struct MomentCheckReport {
    double mu_target = 0.0;
    double var_target = 0.0;
    double mean_sample = 0.0;
    double var_sample = 0.0;
    double skew_sample = 0.0;
    double z_mean = 0.0;
    double z_var = 0.0;
    double z_skew = 0.0;

    bool pass(double n_sigma = 3.0) const {
        return std::abs(z_mean) <= n_sigma && std::abs(z_var) <= n_sigma &&
               std::abs(z_skew) <= n_sigma;
    }
};

/// Freezes one realization of the driver block (and the spot history up to
/// the last knot start), redraws the idiosyncratic spot noise `inner_draws`
/// times through the engine's own update rule, and compares the sample
/// moments of log S at the final knot against the conditional-law
/// parameters the ensemble statistics report.
MomentCheckReport theorem1_moment_check(const HybridModel& model, const LeverageSurface& leverage,
                                        double spot0, const TimeGrid& grid,
                                        Eigen::Index inner_draws, std::uint64_t seed);

} // namespace lsv
