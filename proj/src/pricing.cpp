#include "lsv/pricing.hpp"

#include <cmath>

#include "lsv/black.hpp"
#include "lsv/errors.hpp"
#include "lsv/summation.hpp"

namespace lsv {

std::vector<PriceCell> price_european(const HybridModel& model, const LeverageSurface& leverage,
                                      double spot0, const TimeGrid& grid,
                                      const std::vector<double>& maturities,
                                      const std::vector<std::vector<double>>& strikes_per_maturity,
                                      const PricingConfig& cfg) {
    if (maturities.size() != strikes_per_maturity.size())
        throw ValidationError("price_european: maturities/strikes mismatch");
    Eigen::Index m = cfg.particles;
    if (cfg.antithetic && (m & 1)) ++m;

    PathEngine::Options opt;
    opt.particles = m;
    opt.seed = cfg.seed;
    opt.spot0 = spot0;
    opt.policy.kind = cfg.antithetic ? StreamPolicy::Kind::Antithetic : StreamPolicy::Kind::Plain;
    PathEngine engine(model, grid, opt);

    std::vector<int> obs_steps;
    obs_steps.reserve(maturities.size());
    for (double t : maturities) obs_steps.push_back(grid.step_of(t));
    for (std::size_t q = 1; q < obs_steps.size(); ++q)
        if (obs_steps[q] <= obs_steps[q - 1])
            throw ValidationError("price_european: maturities must be strictly increasing");

    std::vector<PriceCell> cells;
    auto on_obs = [&](const PathSnapshot& snap) {
        const std::size_t mi = obs_steps.size() - 1;
        std::size_t which = 0;
        for (std::size_t q = 0; q < obs_steps.size(); ++q)
            if (obs_steps[q] == snap.step) which = q;
        (void)mi;
        const auto& ks = strikes_per_maturity[which];
        const Eigen::Index units = cfg.antithetic ? m / 2 : m;
        const double t = snap.t;
        for (double strike : ks) {
            auto call_u = [&](Eigen::Index u) {
                if (!cfg.antithetic)
                    return snap.df[u] * std::max(snap.spot[u] - strike, 0.0);
                const Eigen::Index a = 2 * u, b = 2 * u + 1;
                return 0.5 * (snap.df[a] * std::max(snap.spot[a] - strike, 0.0) +
                              snap.df[b] * std::max(snap.spot[b] - strike, 0.0));
            };
            auto put_u = [&](Eigen::Index u) {
                if (!cfg.antithetic)
                    return snap.df[u] * std::max(strike - snap.spot[u], 0.0);
                const Eigen::Index a = 2 * u, b = 2 * u + 1;
                return 0.5 * (snap.df[a] * std::max(strike - snap.spot[a], 0.0) +
                              snap.df[b] * std::max(strike - snap.spot[b], 0.0));
            };
            PriceCell cell;
            cell.maturity = t;
            cell.strike = strike;
            const double n = static_cast<double>(units);
            const double sc = deterministic_sum(units, call_u);
            const double sc2 = deterministic_sum(units, [&](Eigen::Index u) {
                const double x = call_u(u);
                return x * x;
            });
            const double sp = deterministic_sum(units, put_u);
            const double sp2 = deterministic_sum(units, [&](Eigen::Index u) {
                const double x = put_u(u);
                return x * x;
            });
            cell.call = sc / n;
            cell.put = sp / n;
            cell.se_call = std::sqrt(std::max(0.0, sc2 / n - cell.call * cell.call) / n);
            cell.se_put = std::sqrt(std::max(0.0, sp2 / n - cell.put * cell.put) / n);
            cell.mean_df = deterministic_sum(snap.df) / static_cast<double>(snap.df.size());
            cell.mean_df_spot = deterministic_sum(snap.df.size(), [&](Eigen::Index u) {
                                    return snap.df[u] * snap.spot[u];
                                }) /
                                static_cast<double>(snap.df.size());
            cells.push_back(cell);
        }
    };

    engine.run(leverage, nullptr, obs_steps, on_obs);
    return cells;
}

RepriceReport reprice_report(const HybridModel& model, const LeverageSurface& leverage,
                             const ImpliedVolSurface& surface, const TimeGrid& grid,
                             const std::vector<double>& maturities, double moneyness_lo,
                             double moneyness_hi, int n_strikes, const PricingConfig& cfg) {
    std::vector<std::vector<double>> strikes(maturities.size());
    for (std::size_t q = 0; q < maturities.size(); ++q) {
        const double fwd = surface.forward(maturities[q]);
        for (int j = 0; j < n_strikes; ++j) {
            const double mny =
                moneyness_lo + (moneyness_hi - moneyness_lo) * j / std::max(1, n_strikes - 1);
            strikes[q].push_back(mny * fwd);
        }
    }
    const auto cells = price_european(model, leverage, surface.spot(), grid, maturities, strikes, cfg);

    RepriceReport rep;
    double sum_abs = 0.0;
    for (const auto& c : cells) {
        const double df = surface.curve().zcb(c.maturity);
        const double fwd = surface.forward(c.maturity);
        RepriceRow row;
        row.maturity = c.maturity;
        row.strike = c.strike;
        row.target_iv = surface.vol(c.strike, c.maturity);
        row.model_iv = implied_vol_black(c.call, fwd, c.strike, c.maturity, df);
        row.err_bps = (row.model_iv - row.target_iv) * 1e4;
        const double vega = black_vega(fwd, c.strike, row.model_iv, c.maturity, df);
        row.se_bps = vega > 0.0 ? c.se_call / vega * 1e4 : 0.0;
        rep.rows.push_back(row);
        rep.max_abs_bps = std::max(rep.max_abs_bps, std::abs(row.err_bps));
        sum_abs += std::abs(row.err_bps);
    }
    rep.mean_abs_bps = rep.rows.empty() ? 0.0 : sum_abs / static_cast<double>(rep.rows.size());
    return rep;
}

} // namespace lsv
