#pragma once

#include "lsv/run_config.hpp"

namespace lsv {

// exit codes shared with the CLI
constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitIo = 4;

/// Calibrates the leverage surface and writes leverage.csv, diagnostics.json,
/// ess.csv and manifest.json into the output directory.
int cmd_calibrate(const RunConfig& cfg);

/// Reprices against the target surface using a previously written leverage
/// artifact; writes report.csv and per-maturity smile CSVs.
int cmd_validate(const RunConfig& cfg);

/// Runs calibrate+validate for every capable estimator method with shared
/// seeds, plus the estimator variance study.
int cmd_compare(const RunConfig& cfg);

} // namespace lsv
