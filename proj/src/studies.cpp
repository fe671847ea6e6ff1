#include "lsv/studies.hpp"

#include <cmath>

#include "lsv/errors.hpp"
#include "lsv/estimators.hpp"
#include "lsv/rng.hpp"

namespace lsv {

VarianceStudy estimator_variance_study(const HybridModel& model, const LeverageSurface& leverage,
                                       double spot0, const TimeGrid& grid,
                                       const std::vector<double>& strikes, int replications,
                                       Eigen::Index particles, std::uint64_t seed0,
                                       double bandwidth_mult) {
    if (replications < 30)
        throw ValidationError("estimator_variance_study: need at least 30 replications");
    VarianceStudy study;
    study.replications = replications;
    study.t = grid.knot_time(grid.n_knots() - 1);
    study.has_lognormal = model.lognormal_family();
    study.bandwidth =
        bandwidth_mult * bandwidth_rule(particles, study.t, model.vol_scale(), spot0);

    const std::size_t ns = strikes.size();
    Eigen::MatrixXd vals_exact(replications, ns), vals_logn(replications, ns),
        vals_kernel(replications, ns);

    for (int rep = 0; rep < replications; ++rep) {
        PathEngine::Options opt;
        opt.particles = particles;
        opt.seed = derive_seed(seed0, static_cast<std::uint64_t>(rep) + 1);
        opt.spot0 = spot0;
        PathEngine engine(model, grid, opt);
        const int last_knot = grid.n_knots() - 1;
        engine.run(leverage, [&](const KnotStats& stats) {
            if (stats.knot_index != last_knot) return;
            ConditionalEstimator est(stats);
            for (std::size_t j = 0; j < ns; ++j) {
                vals_exact(rep, static_cast<Eigen::Index>(j)) = est.exact_ratio(strikes[j]).value;
                vals_logn(rep, static_cast<Eigen::Index>(j)) =
                    study.has_lognormal ? est.lognormal_ratio(strikes[j]).value : 0.0;
                vals_kernel(rep, static_cast<Eigen::Index>(j)) =
                    kernel_conditional_ratio(stats.spot, stats.v, stats.df, strikes[j],
                                             study.bandwidth)
                        .value;
            }
        });
    }

    const double n = replications;
    for (std::size_t j = 0; j < ns; ++j) {
        const Eigen::Index c = static_cast<Eigen::Index>(j);
        VarianceStudyRow row;
        row.strike = strikes[j];
        row.mean_exact = vals_exact.col(c).mean();
        row.mean_lognormal = vals_logn.col(c).mean();
        row.mean_kernel = vals_kernel.col(c).mean();
        row.var_exact = (vals_exact.col(c).array() - row.mean_exact).square().sum() / (n - 1.0);
        row.var_lognormal = (vals_logn.col(c).array() - row.mean_lognormal).square().sum() / (n - 1.0);
        row.var_kernel = (vals_kernel.col(c).array() - row.mean_kernel).square().sum() / (n - 1.0);
        study.rows.push_back(row);
    }
    return study;
}

MomentCheckReport theorem1_moment_check(const HybridModel& model, const LeverageSurface& leverage,
                                        double spot0, const TimeGrid& grid,
                                        Eigen::Index inner_draws, std::uint64_t seed) {
    if (grid.n_knots() != 1 || grid.knot_steps.back() != grid.n_steps)
        throw ValidationError(
            "theorem1_moment_check: grid must have a single knot at the horizon so the frozen "
            "conditioning path is common to all inner draws");

    MomentCheckReport rep;
    PathEngine::Options opt;
    opt.particles = inner_draws;
    opt.seed = seed;
    opt.spot0 = spot0;
    opt.policy.kind = StreamPolicy::Kind::FrozenZ;
    PathEngine engine(model, grid, opt);

    engine.run(leverage, [&](const KnotStats& stats) {
        const Eigen::Index n = stats.spot.size();
        const Eigen::ArrayXd x = stats.spot.log();
        rep.mu_target = stats.mu[0];
        rep.var_target = (1.0 - stats.rho_hat2) * stats.sigma2[0];

        const double mean = x.mean();
        const Eigen::ArrayXd cent = x - mean;
        const double var = cent.square().sum() / static_cast<double>(n - 1);
        const double sd = std::sqrt(var);
        const double m3 = cent.cube().sum() / static_cast<double>(n);
        const double skew = m3 / (sd * sd * sd);

        rep.mean_sample = mean;
        rep.var_sample = var;
        rep.skew_sample = skew;
        const double nn = static_cast<double>(n);
        if (rep.var_target > 0.0) {
            rep.z_mean = (mean - rep.mu_target) / (sd / std::sqrt(nn));
            rep.z_var = (var - rep.var_target) / (rep.var_target * std::sqrt(2.0 / (nn - 1.0)));
            rep.z_skew = skew / std::sqrt(6.0 / nn);
        } else {
            // degenerate conditioning: all draws must equal μ exactly
            rep.z_mean = (x == rep.mu_target).all() ? 0.0 : 1e9;
            rep.z_var = var == 0.0 ? 0.0 : 1e9;
            rep.z_skew = 0.0;
        }
    });
    return rep;
}

} // namespace lsv
