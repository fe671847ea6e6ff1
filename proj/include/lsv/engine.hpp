#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "lsv/grid.hpp"
#include "lsv/leverage_surface.hpp"
#include "lsv/model.hpp"

namespace lsv {

/// Estimator inputs assembled at a calibration knot t_i.
///
/// mu/sigma2 are the per-particle conditional-law parameters of log S_{t_i}
/// given the spot information at the knot-interval start and the full driver
/// block through t_i (multi-substep contributions summed, leverage frozen at
/// the particle's spot at the interval start).  mu_t/sigma2_t condition one
/// simulation node back; together with xi_t and the shared (nu_t, rho_t) they
/// parameterize the bivariate-lognormal closed form.
struct KnotStats {
    int knot_index = -1;
    int step = 0;
    double t = 0.0;
    double dt_sub = 0.0;
    double rho_hat2 = 0.0;

    Eigen::ArrayXd mu;
    Eigen::ArrayXd sigma2;
    Eigen::ArrayXd spot;
    Eigen::ArrayXd v;
    Eigen::ArrayXd df;
    Eigen::ArrayXd r;

    bool has_lognormal = false;
    Eigen::ArrayXd mu_t;
    Eigen::ArrayXd sigma2_t;
    Eigen::ArrayXd xi_t;
    double nu_t = 0.0;
    double rho_t = 0.0;
    double nu_unc = 0.0;

    Eigen::Index zero_sigma2 = 0;  // flagged degenerate particles
};

/// Spot/discount snapshot for pricing observers.
struct PathSnapshot {
    int step = 0;
    double t = 0.0;
    Eigen::ArrayXd spot;
    Eigen::ArrayXd df;
};

/// McKean-Vlasov predictor loop: diffuses the particle ensemble under the
/// current leverage surface, freezing each particle's leverage at its spot at
/// every surface-knot start (per the piecewise-in-time leverage structure)
/// and accumulating the conditional-law statistics over knot intervals.
///
/// Deterministic for a fixed (seed, particle count, grid) at any thread
/// count: all draws are counter-addressed, all reductions order-fixed.
class PathEngine {
public:
    struct Options {
        Eigen::Index particles = 10000;
        std::uint64_t seed = 1;
        double spot0 = 100.0;
        StreamPolicy policy{};
        /// test hook: overrides the idiosyncratic spot normal
        std::function<double(Eigen::Index particle, int step)> eps_override;
    };

    PathEngine(const HybridModel& model, const TimeGrid& grid, Options opt);

    using KnotVisitor = std::function<void(const KnotStats&)>;
    using ObsVisitor = std::function<void(const PathSnapshot&)>;

    /// Runs the full grid.  `leverage` may be extended by the knot visitor
    /// (calibration corrector); it is re-read at every knot start.
    /// `obs_steps` must be sorted ascending.
    void run(const LeverageSurface& leverage, const KnotVisitor& on_knot,
             const std::vector<int>& obs_steps = {}, const ObsVisitor& on_obs = nullptr);

    const TimeGrid& grid() const { return grid_; }
    Eigen::Index particles() const { return opt_.particles; }

private:
    const HybridModel& model_;
    TimeGrid grid_;
    Options opt_;
};

} // namespace lsv
