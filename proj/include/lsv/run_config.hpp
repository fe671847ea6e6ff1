#pragma once

#include <optional>
#include <string>

#include "lsv/calibration.hpp"
#include "lsv/discount_curve.hpp"
#include "lsv/model.hpp"
#include "lsv/vol_surface.hpp"

namespace lsv {

struct VasicekCurveSpec {
    VasicekParams params;
    double horizon = 2.5;
    int steps_per_year = 252;
};

struct MarketConfig {
    double spot = 100.0;
    std::string surface_csv;                         // or:
    std::optional<SyntheticSurfaceSpec> synthetic;   // SVI blocks
    std::string curve_csv;                           // or:
    std::optional<VasicekCurveSpec> curve_vasicek;   // analytic bond curve on a grid
};

struct ModelConfig {
    std::string type = "rough_bergomi";  // rough_bergomi | bergomi_2f | const_vol
    RoughBergomiParams rough;
    Bergomi2FParams bergomi;
    ConstVolParams cvol;
    bool xi0_from_surface = true;  // flat ξ0 from the first slice's ATM variance
    std::string xi0_csv;
};

struct ValidationConfig {
    std::vector<double> maturities{0.25, 0.5, 1.0, 2.0};
    double moneyness_lo = 0.8;
    double moneyness_hi = 1.2;
    int n_strikes = 9;
    Eigen::Index particles = 50000;
    int replications = 30;
    std::vector<double> variance_strike_mults{0.9, 1.0, 1.1};
    Eigen::Index variance_particles = 4000;
    double variance_t = 0.25;
    std::vector<std::string> compare_methods;  // empty: all capable
};

struct OutputConfig {
    std::string dir = "out";
    bool write_ess = true;
};

struct RunConfig {
    std::uint64_t seed = 1;
    MarketConfig market;
    ModelConfig model;
    CalibrationConfig calibration;
    ValidationConfig validation;
    OutputConfig output;
    std::string raw_text;  // the config file content, hashed into the manifest
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

/// FNV-1a 64 of the effective config text + seed, hex-encoded.
std::string config_hash(const RunConfig& cfg);

struct MarketData {
    ImpliedVolSurface surface;
    DiscountCurve curve;
};

MarketData build_market(const RunConfig& cfg);
HybridModel build_model(const RunConfig& cfg, const ImpliedVolSurface& surface);

} // namespace lsv
