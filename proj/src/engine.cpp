#include "lsv/engine.hpp"

#include <cmath>

#include "lsv/errors.hpp"

namespace lsv {

namespace {
constexpr std::uint64_t kStreamEps = 16;
}

PathEngine::PathEngine(const HybridModel& model, const TimeGrid& grid, Options opt)
    : model_(model), grid_(grid), opt_(std::move(opt)) {
    grid_.validate();
    if (opt_.particles < 1) throw ValidationError("PathEngine: need at least one particle");
}

void PathEngine::run(const LeverageSurface& leverage, const KnotVisitor& on_knot,
                     const std::vector<int>& obs_steps, const ObsVisitor& on_obs) {
    const Eigen::Index m = opt_.particles;
    const double dt = grid_.dt;

    auto session = model_.start_session(grid_, m, opt_.policy, NormalStream(opt_.seed));
    const double rho_hat2 = model_.correlation().rho_hat2;
    const double c_perp = std::sqrt(std::max(0.0, 1.0 - rho_hat2) * dt);

    Eigen::ArrayXd log_spot = Eigen::ArrayXd::Constant(m, std::log(opt_.spot0));
    Eigen::ArrayXd log_df = Eigen::ArrayXd::Zero(m);
    Eigen::ArrayXd lev(m), log_spot_start(m), acc_mu(m), acc_s2(m), mu_t(m), s2_t(m);

    NormalStream rng(opt_.seed);
    const bool has_override = static_cast<bool>(opt_.eps_override);

    // freeze leverage at interval start
    auto freeze = [&](double t_start) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index u = 0; u < m; ++u)
            lev[u] = leverage.value(std::exp(log_spot[u]), t_start);
        log_spot_start = log_spot;
        acc_mu.setZero();
        acc_s2.setZero();
    };
    freeze(0.0);

    std::size_t knot_ptr = 0;
    std::size_t obs_ptr = 0;

    for (int s = 1; s <= grid_.n_steps; ++s) {
        const bool is_knot =
            knot_ptr < grid_.knot_steps.size() && grid_.knot_steps[knot_ptr] == s;
        const bool lognormal = model_.lognormal_family();
        session->draw_step(s, is_knot && lognormal ? static_cast<int>(knot_ptr) : -1);

        const double* dwp = session->dw_par().data();
        const double* v_left = session->v().data();
        const double* r_left = session->r().data();

#pragma omp parallel for schedule(static)
        for (Eigen::Index u = 0; u < m; ++u) {
            double eps;
            if (has_override) {
                eps = opt_.eps_override(u, s);
            } else {
                double e0, e1;
                rng.pair(opt_.policy.eps_particle(static_cast<std::uint64_t>(u)),
                         static_cast<std::uint64_t>(s), kStreamEps, e0, e1);
                eps = opt_.policy.eps_sign(static_cast<std::uint64_t>(u)) * e0;
            }
            const double lam = lev[u];
            const double vl = v_left[u];
            const double rl = r_left[u];
            const double vol = std::sqrt(vl) * lam;
            const double drift = rl * dt - 0.5 * vl * lam * lam * dt;
            const double dw = dwp[u] + c_perp * eps;

            log_df[u] -= rl * dt;
            mu_t[u] = log_spot[u] + drift;
            s2_t[u] = vl * lam * lam * dt;
            log_spot[u] += drift + vol * dw;
            acc_mu[u] += drift + vol * dwp[u];
            acc_s2[u] += vl * lam * lam * dt;
        }
        session->advance();

        const bool is_obs = obs_ptr < obs_steps.size() && obs_steps[obs_ptr] == s;
        if (is_obs) {
            PathSnapshot snap;
            snap.step = s;
            snap.t = grid_.time(s);
            snap.spot = log_spot.exp();
            snap.df = log_df.exp();
            on_obs(snap);
            ++obs_ptr;
        }

        if (is_knot) {
            if (on_knot) {
                KnotStats ks;
                ks.knot_index = static_cast<int>(knot_ptr);
                ks.step = s;
                ks.t = grid_.time(s);
                ks.dt_sub = dt;
                ks.rho_hat2 = rho_hat2;
                ks.mu = log_spot_start + acc_mu;
                ks.sigma2 = acc_s2;
                ks.spot = log_spot.exp();
                ks.v = session->v();
                ks.df = log_df.exp();
                ks.r = session->r();
                ks.zero_sigma2 = (ks.sigma2 <= 0.0).count();
                if (lognormal) {
                    ks.has_lognormal = true;
                    ks.mu_t = mu_t;
                    ks.sigma2_t = s2_t;
                    ks.xi_t = session->xi_tilde();
                    const auto lp = session->lognormal_params(s);
                    ks.nu_t = lp.nu_tilde;
                    ks.rho_t = lp.rho;
                    ks.nu_unc = lp.nu_unc;
                }
                on_knot(ks);
            }
            ++knot_ptr;
            freeze(grid_.time(s));
        }
    }
}

} // namespace lsv
