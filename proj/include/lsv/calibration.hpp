#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "lsv/engine.hpp"
#include "lsv/estimators.hpp"
#include "lsv/leverage_surface.hpp"
#include "lsv/local_vol.hpp"
#include "lsv/model.hpp"
#include "lsv/vol_surface.hpp"

namespace lsv {

enum class EstimatorMethod { Exact, Lognormal, Kernel };

const char* method_name(EstimatorMethod m);
EstimatorMethod method_from_name(const std::string& name);

struct CalibrationConfig {
    Eigen::Index particles = 50000;
    int steps_per_year = 252;
    int knot_every = 21;  // calibration knots every this many simulation steps
    double horizon = 2.0;
    Eigen::ArrayXd strike_grid;  // empty: 25 geometric points on [0.5, 2]·spot
    EstimatorMethod method = EstimatorMethod::Exact;
    std::uint64_t seed = 1;
    double d_max = kDefaultDMax;
    double floor_fraction = 0.05;          // λ² floored at (floor_fraction · σ_dup)²
    double abort_floored_fraction = 0.20;  // non-convergence threshold per slice
    double bandwidth_mult = 1.0;           // kernel benchmark: scales the rule of thumb

    void validate() const;
    TimeGrid make_grid() const;
    Eigen::ArrayXd make_strikes(double spot) const;
};

struct SliceDiagnostics {
    int slice = 0;  // leverage slice index (knot + 1)
    double t = 0.0;
    std::vector<int> floored_nodes;
    std::vector<int> dropped_nodes;
    double min_ess = 0.0;
    double max_ess = 0.0;
    double elapsed_ms = 0.0;
};

struct EssRow {
    double t = 0.0;
    double strike = 0.0;
    double ess = 0.0;
    EstimatorMethod method = EstimatorMethod::Exact;
};

struct CalibrationResult {
    LeverageSurface leverage;
    std::vector<SliceDiagnostics> slices;
    std::vector<EssRow> ess;
    bool converged = true;
    int aborted_slice = -1;
    std::string message;
    double total_ms = 0.0;
};

/// Market quantities the corrector consumes, precomputed per (knot, strike).
struct CalibrationTarget {
    Eigen::ArrayXd knot_times;
    Eigen::ArrayXd strikes;
    Eigen::MatrixXd sigma_dup2;   // Dupire local variance
    Eigen::MatrixXd half_k_d2c;   // ½ K ∂²C/∂K²
    Eigen::ArrayXd rbar;          // mean short rate per knot
    Eigen::ArrayXd atm_vol;       // implied ATM vol per knot (bandwidth rule)
    Eigen::ArrayXd sigma_dup0;    // slice-0 local vol (T floored near 0)

    static CalibrationTarget build(const ImpliedVolSurface& surface, const TimeGrid& grid,
                                   const Eigen::ArrayXd& strikes);
};

/// λ(K_j, t_0) = σ_Dup(K_j, t_0) / sqrt(V_0).
Eigen::ArrayXd initialize_leverage(const Eigen::ArrayXd& sigma_dup0, double v0);

/// Forward predictor-corrector calibration of the leverage surface.
CalibrationResult run_calibration(const HybridModel& model, const ImpliedVolSurface& surface,
                                  const CalibrationConfig& config);

} // namespace lsv
