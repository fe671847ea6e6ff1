#pragma once

#include <string>
#include <vector>

#include "lsv/calibration.hpp"
#include "lsv/discount_curve.hpp"
#include "lsv/leverage_surface.hpp"
#include "lsv/model.hpp"
#include "lsv/pricing.hpp"
#include "lsv/studies.hpp"
#include "lsv/vol_surface.hpp"

namespace lsv {

/// Shortest round-trip-exact decimal rendering shared by all writers, so a
/// run's artifacts are byte-identical across thread counts and re-runs.
std::string format_double(double x);

/// Rows of doubles under an exact expected header.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path,
                                                  const std::string& expected_header);

// surface CSV: header "T,K,iv"
ImpliedVolSurface load_surface_csv(const std::string& path, double spot, DiscountCurve curve);
void write_surface_csv(const std::string& path, const ImpliedVolSurface& surface);

// discount curve CSV: header "t,zcb"
DiscountCurve load_curve_csv(const std::string& path);
void write_curve_csv(const std::string& path, const DiscountCurve& curve);

// forward-variance CSV: header "t,xi0"
ForwardVarianceCurve load_xi_csv(const std::string& path);

// leverage CSV: header "t,K,lambda", one row per (slice, strike)
LeverageSurface load_leverage_csv(const std::string& path);
void write_leverage_csv(const std::string& path, const LeverageSurface& leverage);

// reprice report CSV: header "T,K,target_iv,model_iv,err_bps,se_bps"
void write_reprice_csv(const std::string& path, const RepriceReport& report);

// per-maturity smile CSVs "smile_<idx>.csv": header "K,target_iv,model_iv,se_bps"
void write_smile_csvs(const std::string& dir, const std::string& prefix,
                      const RepriceReport& report);

// variance study CSV: header "K,method,variance"
void write_variance_study_csv(const std::string& path, const VarianceStudy& study);

// effective-sample-size CSV: header "t,K,ess,method"
void write_ess_csv(const std::string& path, const std::vector<EssRow>& rows);

} // namespace lsv
