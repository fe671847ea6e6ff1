#include "lsv/run_config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "lsv/csv.hpp"
#include "lsv/errors.hpp"

namespace lsv {

using nlohmann::json;

namespace {

VasicekParams parse_vasicek(const json& j) {
    VasicekParams p;
    p.kappa = j.value("kappa", p.kappa);
    p.sigma = j.value("sigma", p.sigma);
    p.r0 = j.value("r0", p.r0);
    p.validate();
    return p;
}

ForwardVarianceCurve parse_xi0(const json& j, ModelConfig& mc) {
    if (j.contains("xi0")) {
        mc.xi0_from_surface = false;
        const auto& x = j.at("xi0");
        if (x.is_number()) return ForwardVarianceCurve::flat(x.get<double>());
        if (x.is_string()) {
            mc.xi0_csv = x.get<std::string>();
            return ForwardVarianceCurve::flat(0.04);  // placeholder; loaded in build_model
        }
        throw ValidationError("model.xi0 must be a number or a CSV path");
    }
    mc.xi0_from_surface = true;
    return ForwardVarianceCurve::flat(0.04);
}

} // namespace

RunConfig parse_run_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig cfg;
    cfg.raw_text = text;
    cfg.seed = j.value("seed", std::uint64_t{1});

    if (!j.contains("market")) throw ValidationError("config: missing market block");
    const auto& jm = j.at("market");
    cfg.market.spot = jm.value("spot", 100.0);
    if (jm.contains("surface_csv")) cfg.market.surface_csv = jm.at("surface_csv").get<std::string>();
    if (jm.contains("synthetic")) {
        const auto& js = jm.at("synthetic");
        SyntheticSurfaceSpec spec;
        spec.spot = cfg.market.spot;
        spec.k_min = js.value("k_min", spec.k_min);
        spec.k_max = js.value("k_max", spec.k_max);
        spec.n_strikes = js.value("n_strikes", spec.n_strikes);
        if (!js.contains("slices") || !js.at("slices").is_array() || js.at("slices").empty())
            throw ValidationError("config: market.synthetic.slices must be a non-empty array");
        for (const auto& slice : js.at("slices")) {
            SviSlice s;
            s.maturity = slice.at("T").get<double>();
            s.a = slice.at("a").get<double>();
            s.b = slice.at("b").get<double>();
            s.rho = slice.at("rho").get<double>();
            s.m = slice.value("m", 0.0);
            s.sigma = slice.at("sigma").get<double>();
            spec.slices.push_back(s);
        }
        cfg.market.synthetic = std::move(spec);
    }
    if (cfg.market.surface_csv.empty() == !cfg.market.synthetic.has_value())
        throw ValidationError("config: market needs exactly one of surface_csv or synthetic");
    if (jm.contains("curve_csv")) cfg.market.curve_csv = jm.at("curve_csv").get<std::string>();
    if (jm.contains("curve_vasicek")) {
        VasicekCurveSpec vc;
        vc.params = parse_vasicek(jm.at("curve_vasicek"));
        vc.horizon = jm.at("curve_vasicek").value("horizon", vc.horizon);
        vc.steps_per_year = jm.at("curve_vasicek").value("steps_per_year", vc.steps_per_year);
        cfg.market.curve_vasicek = vc;
    }
    if (cfg.market.curve_csv.empty() == !cfg.market.curve_vasicek.has_value())
        throw ValidationError("config: market needs exactly one of curve_csv or curve_vasicek");

    if (!j.contains("model")) throw ValidationError("config: missing model block");
    const auto& jmod = j.at("model");
    cfg.model.type = jmod.value("type", std::string{"rough_bergomi"});
    if (cfg.model.type == "rough_bergomi") {
        auto& p = cfg.model.rough;
        p.hurst = jmod.value("H", p.hurst);
        p.beta = jmod.value("beta", p.beta);
        p.nu = jmod.value("nu", p.nu);
        p.rho_sv = jmod.value("rho_sv", p.rho_sv);
        p.rho_sr = jmod.value("rho_sr", p.rho_sr);
        p.rho_vr = jmod.value("rho_vr", p.rho_vr);
        if (jmod.contains("vasicek")) p.rates = parse_vasicek(jmod.at("vasicek"));
        p.xi0 = parse_xi0(jmod, cfg.model);
    } else if (cfg.model.type == "bergomi_2f") {
        auto& p = cfg.model.bergomi;
        p.kappa_x = jmod.value("kappa_x", p.kappa_x);
        p.kappa_y = jmod.value("kappa_y", p.kappa_y);
        p.theta = jmod.value("theta", p.theta);
        p.nu = jmod.value("nu", p.nu);
        p.rho_sx = jmod.value("rho_sx", p.rho_sx);
        p.rho_sy = jmod.value("rho_sy", p.rho_sy);
        p.rho_xy = jmod.value("rho_xy", p.rho_xy);
        p.rho_sr = jmod.value("rho_sr", p.rho_sr);
        p.rho_xr = jmod.value("rho_xr", p.rho_xr);
        p.rho_yr = jmod.value("rho_yr", p.rho_yr);
        if (jmod.contains("vasicek")) p.rates = parse_vasicek(jmod.at("vasicek"));
        p.xi0 = parse_xi0(jmod, cfg.model);
    } else if (cfg.model.type == "const_vol") {
        auto& p = cfg.model.cvol;
        p.v0 = jmod.value("v0", p.v0);
        p.rho_sr = jmod.value("rho_sr", p.rho_sr);
        if (jmod.contains("vasicek")) p.rates = parse_vasicek(jmod.at("vasicek"));
    } else {
        throw ValidationError("config: unknown model.type '" + cfg.model.type + "'");
    }

    if (j.contains("calibration")) {
        const auto& jc = j.at("calibration");
        auto& c = cfg.calibration;
        c.particles = jc.value("particles", c.particles);
        c.steps_per_year = jc.value("steps_per_year", c.steps_per_year);
        c.knot_every = jc.value("knot_every", c.knot_every);
        c.horizon = jc.value("horizon", c.horizon);
        if (jc.contains("method")) c.method = method_from_name(jc.at("method").get<std::string>());
        c.d_max = jc.value("d_max", c.d_max);
        c.bandwidth_mult = jc.value("bandwidth_mult", c.bandwidth_mult);
        if (jc.contains("strikes")) {
            const auto& js = jc.at("strikes");
            const double lo = js.value("min_mult", 0.5) * cfg.market.spot;
            const double hi = js.value("max_mult", 2.0) * cfg.market.spot;
            const int n = js.value("count", 25);
            if (n < 2 || !(hi > lo))
                throw ValidationError("config: calibration.strikes invalid");
            Eigen::ArrayXd ks(n);
            for (int q = 0; q < n; ++q)
                ks[q] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * q / (n - 1));
            c.strike_grid = ks;
        }
    }
    cfg.calibration.seed = cfg.seed;

    if (j.contains("validation")) {
        const auto& jv = j.at("validation");
        auto& v = cfg.validation;
        if (jv.contains("maturities")) v.maturities = jv.at("maturities").get<std::vector<double>>();
        v.moneyness_lo = jv.value("moneyness_lo", v.moneyness_lo);
        v.moneyness_hi = jv.value("moneyness_hi", v.moneyness_hi);
        v.n_strikes = jv.value("n_strikes", v.n_strikes);
        v.particles = jv.value("particles", cfg.calibration.particles);
        v.replications = jv.value("replications", v.replications);
        if (jv.contains("variance_strike_mults"))
            v.variance_strike_mults = jv.at("variance_strike_mults").get<std::vector<double>>();
        v.variance_particles = jv.value("variance_particles", v.variance_particles);
        v.variance_t = jv.value("variance_t", v.variance_t);
        if (jv.contains("compare_methods"))
            v.compare_methods = jv.at("compare_methods").get<std::vector<std::string>>();
    } else {
        cfg.validation.particles = cfg.calibration.particles;
    }

    if (j.contains("output")) {
        cfg.output.dir = j.at("output").value("dir", cfg.output.dir);
        cfg.output.write_ess = j.at("output").value("ess", cfg.output.write_ess);
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    mix(cfg.raw_text);
    mix("|seed=" + std::to_string(cfg.seed));
    mix("|out=" + cfg.output.dir);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

MarketData build_market(const RunConfig& cfg) {
    DiscountCurve curve;
    if (!cfg.market.curve_csv.empty()) {
        curve = load_curve_csv(cfg.market.curve_csv);
    } else {
        const auto& vc = *cfg.market.curve_vasicek;
        const int n = static_cast<int>(std::lround(vc.horizon * vc.steps_per_year));
        Eigen::ArrayXd t(n), z(n);
        for (int i = 1; i <= n; ++i) {
            t[i - 1] = static_cast<double>(i) / vc.steps_per_year;
            z[i - 1] = vc.params.zcb(t[i - 1]);
        }
        curve = DiscountCurve(t, z);
    }
    if (!cfg.market.surface_csv.empty())
        return {load_surface_csv(cfg.market.surface_csv, cfg.market.spot, curve), curve};
    return {synthesize_surface(*cfg.market.synthetic, curve), curve};
}

HybridModel build_model(const RunConfig& cfg, const ImpliedVolSurface& surface) {
    ForwardVarianceCurve xi;
    if (!cfg.model.xi0_csv.empty()) {
        xi = load_xi_csv(cfg.model.xi0_csv);
    } else if (cfg.model.xi0_from_surface) {
        const double t1 = surface.slices().front().maturity;
        xi = ForwardVarianceCurve::flat(surface.total_var(surface.forward(t1), t1) / t1);
    }
    if (cfg.model.type == "rough_bergomi") {
        RoughBergomiParams p = cfg.model.rough;
        if (!cfg.model.xi0_csv.empty() || cfg.model.xi0_from_surface) p.xi0 = xi;
        return HybridModel::rough_bergomi(p);
    }
    if (cfg.model.type == "bergomi_2f") {
        Bergomi2FParams p = cfg.model.bergomi;
        if (!cfg.model.xi0_csv.empty() || cfg.model.xi0_from_surface) p.xi0 = xi;
        return HybridModel::bergomi_2f(p);
    }
    return HybridModel::const_vol(cfg.model.cvol);
}

} // namespace lsv
