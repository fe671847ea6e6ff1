#include "lsv/calibration.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "lsv/errors.hpp"

namespace lsv {

namespace {
constexpr double kSliceZeroMaturity = 1e-3;

struct AbortSignal {};

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}
} // namespace

const char* method_name(EstimatorMethod m) {
    switch (m) {
        case EstimatorMethod::Exact: return "exact";
        case EstimatorMethod::Lognormal: return "lognormal";
        case EstimatorMethod::Kernel: return "kernel";
    }
    return "?";
}

EstimatorMethod method_from_name(const std::string& name) {
    if (name == "exact") return EstimatorMethod::Exact;
    if (name == "lognormal") return EstimatorMethod::Lognormal;
    if (name == "kernel") return EstimatorMethod::Kernel;
    throw ValidationError("unknown estimator method: " + name);
}

void CalibrationConfig::validate() const {
    if (particles < 1000) throw ValidationError("CalibrationConfig: need at least 1000 particles");
    if (steps_per_year < 1 || knot_every < 1)
        throw ValidationError("CalibrationConfig: bad grid parameters");
    if (!(horizon > 0.0)) throw ValidationError("CalibrationConfig: horizon must be positive");
    if (!(d_max > 0.0)) throw ValidationError("CalibrationConfig: d_max must be positive");
    for (Eigen::Index j = 1; j < strike_grid.size(); ++j)
        if (!(strike_grid[j] > strike_grid[j - 1]))
            throw ValidationError("CalibrationConfig: strike grid must be sorted");
}

TimeGrid CalibrationConfig::make_grid() const {
    const int n_steps = static_cast<int>(std::lround(horizon * steps_per_year));
    if (std::abs(n_steps - horizon * steps_per_year) > 1e-9)
        throw ValidationError("CalibrationConfig: horizon must be a whole number of steps");
    return make_uniform_grid(1.0 / steps_per_year, n_steps, knot_every);
}

Eigen::ArrayXd CalibrationConfig::make_strikes(double spot) const {
    if (strike_grid.size() > 0) return strike_grid;
    const int n = 25;
    Eigen::ArrayXd ks(n);
    const double lo = std::log(0.5 * spot), hi = std::log(2.0 * spot);
    for (int j = 0; j < n; ++j) ks[j] = std::exp(lo + (hi - lo) * j / (n - 1));
    return ks;
}

CalibrationTarget CalibrationTarget::build(const ImpliedVolSurface& surface, const TimeGrid& grid,
                                           const Eigen::ArrayXd& strikes) {
    CalibrationTarget t;
    const int nk = grid.n_knots();
    t.strikes = strikes;
    t.knot_times.resize(nk);
    t.sigma_dup2.resize(nk, strikes.size());
    t.half_k_d2c.resize(nk, strikes.size());
    t.rbar.resize(nk);
    t.atm_vol.resize(nk);
    for (int i = 0; i < nk; ++i) {
        const double ti = grid.knot_time(i);
        t.knot_times[i] = ti;
        t.rbar[i] = surface.curve().mean_short_rate(ti);
        t.atm_vol[i] = surface.vol(surface.forward(ti), ti);
        for (Eigen::Index j = 0; j < strikes.size(); ++j) {
            const double sd = dupire_local_vol(surface, strikes[j], ti);
            t.sigma_dup2(i, j) = sd * sd;
            t.half_k_d2c(i, j) =
                0.5 * strikes[j] * call_price_derivatives(surface, strikes[j], ti).dK2;
        }
    }
    t.sigma_dup0.resize(strikes.size());
    const double t0 = std::min(kSliceZeroMaturity, 0.5 * grid.knot_time(0));
    for (Eigen::Index j = 0; j < strikes.size(); ++j)
        t.sigma_dup0[j] = dupire_local_vol(surface, strikes[j], t0);
    return t;
}

Eigen::ArrayXd initialize_leverage(const Eigen::ArrayXd& sigma_dup0, double v0) {
    if (!(v0 > 0.0)) throw ValidationError("initialize_leverage: V0 must be positive");
    Eigen::ArrayXd lam(sigma_dup0.size());
    for (Eigen::Index j = 0; j < sigma_dup0.size(); ++j) {
        if (!(sigma_dup0[j] > 0.0))
            throw ValidationError("initialize_leverage: non-positive local vol node");
        lam[j] = sigma_dup0[j] / std::sqrt(v0);
    }
    return lam;
}

CalibrationResult run_calibration(const HybridModel& model, const ImpliedVolSurface& surface,
                                  const CalibrationConfig& config) {
    config.validate();
    if (config.method == EstimatorMethod::Lognormal && !model.lognormal_family())
        throw ValidationError("lognormal estimator requested for a model outside the lognormal family");

    const double t_begin = now_ms();
    const TimeGrid grid = config.make_grid();
    const double spot0 = surface.spot();
    const Eigen::ArrayXd strikes = config.make_strikes(spot0);
    const CalibrationTarget target = CalibrationTarget::build(surface, grid, strikes);

    Eigen::ArrayXd knot_times(grid.n_knots() + 1);
    knot_times[0] = 0.0;
    for (int i = 0; i < grid.n_knots(); ++i) knot_times[i + 1] = grid.knot_time(i);

    CalibrationResult res;
    res.leverage = LeverageSurface(knot_times, strikes);
    res.leverage.set_slice(0, initialize_leverage(target.sigma_dup0, model.v0()));

    PathEngine::Options opt;
    opt.particles = config.particles;
    opt.seed = config.seed;
    opt.spot0 = spot0;
    PathEngine engine(model, grid, opt);

    const Eigen::Index n_strikes = strikes.size();

    auto visitor = [&](const KnotStats& stats) {
        const double slice_begin = now_ms();
        const int i = stats.knot_index;
        SliceDiagnostics diag;
        diag.slice = i + 1;
        diag.t = stats.t;
        diag.min_ess = std::numeric_limits<double>::infinity();
        diag.max_ess = 0.0;

        ConditionalEstimator est(stats, config.d_max);
        const double bandwidth =
            config.bandwidth_mult *
            bandwidth_rule(stats.spot.size(), stats.t, target.atm_vol[i], spot0);

        Eigen::ArrayXd lam(n_strikes);
        std::vector<bool> estimated(static_cast<std::size_t>(n_strikes), false);
        for (Eigen::Index j = 0; j < n_strikes; ++j) {
            const double strike = strikes[j];
            WeightedEstimate ratio;
            try {
                switch (config.method) {
                    case EstimatorMethod::Exact: ratio = est.exact_ratio(strike); break;
                    case EstimatorMethod::Lognormal: ratio = est.lognormal_ratio(strike); break;
                    case EstimatorMethod::Kernel:
                        ratio = kernel_conditional_ratio(stats.spot, stats.v, stats.df, strike,
                                                         bandwidth);
                        break;
                }
            } catch (const NoMassError&) {
                diag.dropped_nodes.push_back(static_cast<int>(j));
                continue;
            }
            const double rate_term = est.rate_adjustment(strike, target.rbar[i], spot0);
            const double rhs =
                (target.sigma_dup2(i, j) - rate_term / target.half_k_d2c(i, j)) / ratio.value;
            const double floor2 = config.floor_fraction * config.floor_fraction *
                                  target.sigma_dup2(i, j);
            double lam2 = rhs;
            if (!(lam2 > floor2)) {
                lam2 = floor2;
                diag.floored_nodes.push_back(static_cast<int>(j));
            }
            lam[j] = std::sqrt(lam2);
            estimated[static_cast<std::size_t>(j)] = true;
            diag.min_ess = std::min(diag.min_ess, ratio.ess);
            diag.max_ess = std::max(diag.max_ess, ratio.ess);
            res.ess.push_back({stats.t, strike, ratio.ess, config.method});
        }

        const auto n_floored = static_cast<double>(diag.floored_nodes.size());
        if (n_floored > config.abort_floored_fraction * static_cast<double>(n_strikes)) {
            std::ostringstream os;
            os << "calibration aborted at slice " << diag.slice << " (t=" << stats.t << "): "
               << diag.floored_nodes.size() << "/" << n_strikes
               << " corrector nodes floored (vol-of-vol too large for the target smile)";
            res.message = os.str();
            res.aborted_slice = diag.slice;
            res.converged = false;
            diag.elapsed_ms = now_ms() - slice_begin;
            res.slices.push_back(std::move(diag));
            throw AbortSignal{};
        }

        // nodes without estimator mass sit outside the ensemble support:
        // extend flat from the nearest estimated node
        Eigen::Index first = -1, last = -1;
        for (Eigen::Index j = 0; j < n_strikes; ++j)
            if (estimated[static_cast<std::size_t>(j)]) {
                if (first < 0) first = j;
                last = j;
            }
        if (first < 0) {
            std::ostringstream os;
            os << "calibration aborted at slice " << diag.slice << " (t=" << stats.t
               << "): estimator has no mass at any strike node";
            res.message = os.str();
            res.aborted_slice = diag.slice;
            res.converged = false;
            diag.elapsed_ms = now_ms() - slice_begin;
            res.slices.push_back(std::move(diag));
            throw AbortSignal{};
        }
        for (Eigen::Index j = 0; j < n_strikes; ++j) {
            if (estimated[static_cast<std::size_t>(j)]) continue;
            if (j < first)
                lam[j] = lam[first];
            else if (j > last)
                lam[j] = lam[last];
            else {
                Eigen::Index l = j, rgt = j;
                while (!estimated[static_cast<std::size_t>(l)]) --l;
                while (!estimated[static_cast<std::size_t>(rgt)]) ++rgt;
                lam[j] = (j - l) <= (rgt - j) ? lam[l] : lam[rgt];
            }
        }

        res.leverage.set_slice(i + 1, lam);
        diag.elapsed_ms = now_ms() - slice_begin;
        res.slices.push_back(std::move(diag));
    };

    try {
        engine.run(res.leverage, visitor);
    } catch (const AbortSignal&) {
        // result carries the diagnostic
    }
    res.total_ms = now_ms() - t_begin;
    return res;
}

} // namespace lsv
