// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "revcal/revcal.h"

namespace {

struct Common {
  std::string config;
  std::string out = "runs";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file");
  cmd->add_option("--out", c.out, "Root directory for run outputs")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
}

using OptionsPtr = std::unique_ptr<revcal_options, decltype(&revcal_options_free)>;
using RunPtr = std::unique_ptr<revcal_run, decltype(&revcal_run_free)>;

OptionsPtr make_options(const Common& c) {
  revcal_options* raw = nullptr;
  if (revcal_options_create(&raw) != REVCAL_OK) return {nullptr, revcal_options_free};
  OptionsPtr opts(raw, revcal_options_free);
  if (!c.config.empty()) revcal_options_set_config(raw, c.config.c_str());
  revcal_options_set_out_root(raw, c.out.c_str());
  if (c.seed) revcal_options_set_seed(raw, *c.seed);
  return opts;
}

/// Runs one command and prints its outcome; returns the process exit code.
template <class F>
int run_command(F&& invoke) {
  revcal_run* raw = nullptr;
  const revcal_status status = invoke(&raw);
  RunPtr run(raw, revcal_run_free);
  if (!run) {
    std::fprintf(stderr, "revcal: %s\n", revcal_last_error());
    return status;
  }
  std::fputs(revcal_run_summary(run.get()), stdout);
  const std::string dir = revcal_run_dir(run.get());
  if (!dir.empty()) std::printf("run directory: %s\n", dir.c_str());
  const std::string err = revcal_run_error(run.get());
  if (status != REVCAL_OK && !err.empty()) std::fprintf(stderr, "revcal: %s\n", err.c_str());
  return revcal_run_exit_code(run.get());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrated aggregation and decision thresholds for panels of automated reviewers"};
  app.set_version_flag("--version", std::string(revcal_version()));
  app.require_subcommand(1);

  int exit_code = 0;

  // calibrate
  Common cal_common;
  std::string cal_file;
  auto* cal = app.add_subcommand("calibrate", "Fit tau_rate and tau_0.5 on a calibration set");
  add_common(cal, cal_common);
  cal->add_option("calibration_file", cal_file, "Calibration JSONL")->required();
  cal->callback([&] {
    auto opts = make_options(cal_common);
    exit_code = run_command([&](revcal_run** run) {
      return revcal_cmd_calibrate(opts.get(), cal_file.c_str(), run);
    });
  });

  // review
  Common rev_common;
  std::string rev_panels, rev_thresholds;
  auto* rev = app.add_subcommand("review", "Score panels and report ACPT, ICR and conflicts");
  add_common(rev, rev_common);
  rev->add_option("panel_file", rev_panels, "Panel JSONL")->required();
  rev->add_option("--thresholds", rev_thresholds, "thresholds.json from calibrate")->required();
  rev->callback([&] {
    auto opts = make_options(rev_common);
    exit_code = run_command([&](revcal_run** run) {
      return revcal_cmd_review(opts.get(), rev_panels.c_str(), rev_thresholds.c_str(), run);
    });
  });

  // bayes
  Common bay_common;
  std::string bay_panels, bay_thresholds;
  auto* bay = app.add_subcommand("bayes", "Posterior acceptance probability per panel");
  add_common(bay, bay_common);
  bay->add_option("panel_file", bay_panels, "Panel JSONL")->required();
  bay->add_option("--thresholds", bay_thresholds, "thresholds.json from calibrate")->required();
  bay->callback([&] {
    auto opts = make_options(bay_common);
    exit_code = run_command([&](revcal_run** run) {
      return revcal_cmd_bayes(opts.get(), bay_panels.c_str(), bay_thresholds.c_str(), run);
    });
  });

  // detector-eval
  Common det_common;
  std::string det_panels;
  auto* det = app.add_subcommand("detector-eval", "Score reviewer flags against panel labels");
  add_common(det, det_common);
  det->add_option("panel_file", det_panels, "Labeled panel JSONL")->required();
  det->callback([&] {
    auto opts = make_options(det_common);
    exit_code = run_command([&](revcal_run** run) {
      return revcal_cmd_detector_eval(opts.get(), det_panels.c_str(), run);
    });
  });

  // simulate
  auto* sim = app.add_subcommand("simulate", "Synthetic validation experiments");
  sim->require_subcommand(1);
  Common sim_common;
  std::vector<std::int64_t> sim_m, sim_grid;
  std::int64_t sim_replicates = 0;
  for (const char* which : {"margins", "threshold-error", "variance"}) {
    auto* sub = sim->add_subcommand(which);
    add_common(sub, sim_common);
    if (std::string(which) != "threshold-error") {
      sub->add_option("--m", sim_m, "Panel sizes, comma separated")->delimiter(',');
    } else {
      sub->add_option("--grid", sim_grid, "Calibration sizes, comma separated")->delimiter(',');
      sub->add_option("--replicates", sim_replicates, "Bootstrap replicates per size");
    }
    sub->callback([&, which] {
      auto opts = make_options(sim_common);
      exit_code = run_command([&](revcal_run** run) {
        return revcal_cmd_simulate(opts.get(), which, sim_m.data(), sim_m.size(), sim_grid.data(),
                                   sim_grid.size(), sim_replicates, run);
      });
    });
  }

  // bound
  auto* bnd = app.add_subcommand("bound", "Evaluate a closed-form bound");
  bnd->require_subcommand(1);
  revcal_bound_args args;
  revcal_bound_args_init(&args);
  Common bnd_common;
  struct Flag {
    const char* name;
    double* slot;
  };
  const std::vector<std::pair<const char*, std::vector<Flag>>> bound_flags{
      {"tail", {{"--t", &args.t}, {"--sigma-w-sq", &args.sigma_w_sq}, {"--c-max", &args.c_max}}},
      {"margin",
       {{"--gamma", &args.gamma}, {"--sigma-w-sq", &args.sigma_w_sq}, {"--c-max", &args.c_max}}},
      {"scalar",
       {{"--m", &args.m},
        {"--gamma", &args.gamma},
        {"--sigma-sq", &args.sigma_sq},
        {"--range", &args.range}}},
      {"dkw", {{"--n", &args.n}, {"--delta", &args.delta}}},
      {"tau05",
       {{"--eps-pi", &args.eps_pi}, {"--c-min", &args.c_min}, {"--flat-width", &args.flat_width}}},
  };
  for (const auto& [name, flags] : bound_flags) {
    auto* sub = bnd->add_subcommand(name);
    add_common(sub, bnd_common);
    for (const auto& f : flags) sub->add_option(f.name, *f.slot);
    sub->callback([&, name = std::string(name)] {
      double value = 0.0;
      exit_code = run_command([&](revcal_run** run) {
        return revcal_cmd_bound(name.c_str(), &args, &value, run);
      });
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : REVCAL_ERR_INPUT;
  }
  return exit_code;
}
