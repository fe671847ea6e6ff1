#include "lsv/commands.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "lsv/csv.hpp"
#include "lsv/errors.hpp"
#include "lsv/pricing.hpp"
#include "lsv/studies.hpp"

namespace lsv {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

void write_manifest(const RunConfig& cfg, const std::string& command) {
    json j;
    j["command"] = command;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.seed;
    j["version"] = kVersion;
    std::ofstream out(cfg.output.dir + "/manifest.json");
    if (!out) throw IoError("cannot write manifest");
    out << j.dump(2) << "\n";
}

void write_diagnostics(const RunConfig& cfg, const CalibrationResult& res,
                       const std::string& prefix) {
    json j;
    j["converged"] = res.converged;
    j["message"] = res.message;
    j["aborted_slice"] = res.aborted_slice;
    j["total_ms"] = res.total_ms;
    j["method"] = method_name(cfg.calibration.method);
    json slices = json::array();
    for (const auto& s : res.slices) {
        json js;
        js["slice"] = s.slice;
        js["t"] = s.t;
        js["floored_nodes"] = s.floored_nodes;
        js["dropped_nodes"] = s.dropped_nodes;
        js["min_ess"] = s.min_ess;
        js["max_ess"] = s.max_ess;
        js["elapsed_ms"] = s.elapsed_ms;
        slices.push_back(js);
    }
    j["slices"] = slices;
    std::ofstream out(cfg.output.dir + "/" + prefix + "diagnostics.json");
    if (!out) throw IoError("cannot write diagnostics");
    out << j.dump(2) << "\n";
}

CalibrationResult calibrate_once(const RunConfig& cfg, const MarketData& market,
                                 const HybridModel& model, EstimatorMethod method,
                                 const std::string& prefix) {
    CalibrationConfig cc = cfg.calibration;
    cc.method = method;
    auto res = run_calibration(model, market.surface, cc);
    write_leverage_csv(cfg.output.dir + "/" + prefix + "leverage.csv", res.leverage);
    write_diagnostics(cfg, res, prefix);
    if (cfg.output.write_ess) write_ess_csv(cfg.output.dir + "/" + prefix + "ess.csv", res.ess);
    return res;
}

RepriceReport validate_once(const RunConfig& cfg, const MarketData& market,
                            const HybridModel& model, const LeverageSurface& leverage,
                            const std::string& prefix) {
    PricingConfig pc;
    pc.particles = cfg.validation.particles;
    pc.seed = derive_seed(cfg.seed, 0x7072696365ULL);  // out-of-sample pricing seed
    pc.antithetic = true;
    const TimeGrid grid = cfg.calibration.make_grid();
    const auto report =
        reprice_report(model, leverage, market.surface, grid, cfg.validation.maturities,
                       cfg.validation.moneyness_lo, cfg.validation.moneyness_hi,
                       cfg.validation.n_strikes, pc);
    write_reprice_csv(cfg.output.dir + "/" + prefix + "report.csv", report);
    write_smile_csvs(cfg.output.dir, prefix, report);
    return report;
}

} // namespace

int cmd_calibrate(const RunConfig& cfg) {
    ensure_dir(cfg.output.dir);
    const MarketData market = build_market(cfg);
    const HybridModel model = build_model(cfg, market.surface);
    const auto res = calibrate_once(cfg, market, model, cfg.calibration.method, "");
    write_manifest(cfg, "calibrate");
    if (!res.converged) return kExitNonConvergence;
    return kExitOk;
}

int cmd_validate(const RunConfig& cfg) {
    ensure_dir(cfg.output.dir);
    const std::string lev_path = cfg.output.dir + "/leverage.csv";
    if (!std::filesystem::exists(lev_path))
        throw IoError("leverage artifact not found: " + lev_path + " (run calibrate first)");
    const MarketData market = build_market(cfg);
    const HybridModel model = build_model(cfg, market.surface);
    const LeverageSurface leverage = load_leverage_csv(lev_path);
    validate_once(cfg, market, model, leverage, "");
    write_manifest(cfg, "validate");
    return kExitOk;
}

int cmd_compare(const RunConfig& cfg) {
    ensure_dir(cfg.output.dir);
    const MarketData market = build_market(cfg);
    const HybridModel model = build_model(cfg, market.surface);

    std::vector<EstimatorMethod> methods;
    if (!cfg.validation.compare_methods.empty()) {
        for (const auto& name : cfg.validation.compare_methods) {
            const auto m = method_from_name(name);
            if (m == EstimatorMethod::Lognormal && !model.lognormal_family())
                throw ValidationError(
                    "compare: lognormal method requested but the model is not in the lognormal "
                    "family");
            methods.push_back(m);
        }
    } else {
        methods = {EstimatorMethod::Exact, EstimatorMethod::Kernel};
        if (model.lognormal_family())
            methods.insert(methods.begin() + 1, EstimatorMethod::Lognormal);
    }

    bool all_converged = true;
    for (const auto m : methods) {
        const std::string prefix = std::string(method_name(m)) + "_";
        const auto res = calibrate_once(cfg, market, model, m, prefix);
        if (!res.converged) {
            all_converged = false;
            continue;
        }
        validate_once(cfg, market, model, res.leverage, prefix);
    }

    // estimator variance study on a single-knot fixture with flat unit leverage
    {
        const auto& v = cfg.validation;
        const int spy = cfg.calibration.steps_per_year;
        const int n_steps = std::max(1, static_cast<int>(std::lround(v.variance_t * spy)));
        TimeGrid grid = make_uniform_grid(1.0 / spy, n_steps, n_steps);
        Eigen::ArrayXd times(1), strikes(2);
        times << 0.0;
        strikes << 0.5 * cfg.market.spot, 2.0 * cfg.market.spot;
        LeverageSurface flat(times, strikes);
        flat.set_slice(0, Eigen::ArrayXd::Constant(2, 1.0));
        std::vector<double> ks;
        for (double mult : v.variance_strike_mults) ks.push_back(mult * cfg.market.spot);
        const auto study =
            estimator_variance_study(model, flat, cfg.market.spot, grid, ks, v.replications,
                                     v.variance_particles, derive_seed(cfg.seed, 0x76617273ULL));
        write_variance_study_csv(cfg.output.dir + "/variance_study.csv", study);
    }

    write_manifest(cfg, "compare");
    return all_converged ? kExitOk : kExitNonConvergence;
}

} // namespace lsv
