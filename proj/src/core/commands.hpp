// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_COMMANDS_HPP
#define REVCAL_CORE_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace revcal::commands {

/// Process exit-code contract shared by every command.
enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kInputError = 2,
  kCalibrationInfeasible = 3,
  kCheckFailed = 4,
};

struct RunOptions {
  std::optional<std::string> config_path;
  std::string out_root = "runs";
  std::optional<std::uint64_t> seed;
};

struct CommandResult {
  int exit_code = kOk;
  std::string summary;  // human-readable report for stdout
  std::string run_dir;  // empty when the command wrote nothing
  std::string error;    // diagnostic for stderr
};

CommandResult calibrate(const RunOptions& opts, const std::string& calibration_path);
CommandResult review(const RunOptions& opts, const std::string& panels_path,
                     const std::string& thresholds_path);
CommandResult bayes(const RunOptions& opts, const std::string& panels_path,
                    const std::string& thresholds_path);
CommandResult detector_eval(const RunOptions& opts, const std::string& panels_path);

struct SimulateOverrides {
  std::vector<std::int64_t> m_grid;
  std::vector<std::int64_t> n_cal_grid;
  std::optional<std::int64_t> replicates;
};

/// `which` is one of "margins", "threshold-error", "variance".
CommandResult simulate(const RunOptions& opts, const std::string& which,
                       const SimulateOverrides& overrides);

/// Numeric flags for `bound`; each bound reads the subset it needs.
struct BoundArgs {
  std::optional<double> t, gamma, sigma_w_sq, c_max, m, sigma_sq, range, n, delta, eps_pi, c_min,
      flat_width;
};

/// `name` is one of "tail", "margin", "scalar", "dkw", "tau05". On success
/// `value` holds the bound and the summary its 6-significant-digit rendering.
CommandResult bound(const std::string& name, const BoundArgs& args, double* value = nullptr);

}  // namespace revcal::commands

#endif  // REVCAL_CORE_COMMANDS_HPP
