#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cagesim/config.hpp"
#include "cagesim/error.hpp"
#include "cagesim/run.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  bool no_skew = false;
  std::string bar_model;
  bool calibrate = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "YAML run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory (overrides outputs.directory)");
  cmd->add_flag("--no-skew", c.no_skew, "disable the skew average on the stator-rotor mutuals");
  cmd->add_option("--bar-model", c.bar_model, "broken-bar model")->check(CLI::IsMember({"scale", "eliminate"}));
  cmd->add_flag("--calibrate-load", c.calibrate, "tune the load torque to calibration.target_slip first");
}

cagesim::RunConfig effective(const Common& c) {
  cagesim::RunConfig cfg = c.config.empty() ? cagesim::default_config() : cagesim::load_config(c.config);
  if (!c.out.empty()) cfg.outputs.directory = c.out;
  if (c.no_skew) cfg.sim.model.inductance.skew = false;
  if (!c.bar_model.empty()) cfg.fault.bar_model = cagesim::bar_model_from_string(c.bar_model);
  if (c.calibrate) cfg.calibration.enabled = true;
  cfg.validate();
  return cfg;
}

void report(const cagesim::RunResult& r) {
  const auto& m = r.metrics;
  fmt::print("slip {:.5f}  torque {:.3f} N m  Irms {:.3f} A  settle {:.4f} s  first overshoot {:.4f} s\n", m.slip,
             m.mean_torque, m.current_rms, m.settle_time, m.first_overshoot_time);
  if (r.calibration.performed) {
    fmt::print("load calibrated to {:.4f} N m in {} trials{}\n", r.config.motor.load_torque,
               r.calibration.trials.size(), r.calibration.converged ? "" : " (not converged)");
  }
  for (const auto& p : r.peaks) {
    if (p.present) {
      fmt::print("  {:<10} {:9.3f} Hz  measured {:9.3f} Hz  {:8.2f} dB\n", cagesim::to_string(p.family), p.predicted_hz,
                 p.measured_hz, p.mag_db);
    } else {
      fmt::print("  {:<10} {:9.3f} Hz  absent (floor {:.2f} dB)\n", cagesim::to_string(p.family), p.predicted_hz,
                 p.floor_db);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled-circuit simulation and current-spectrum analysis of cage induction motors"};
  app.require_subcommand(0, 1);
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the default configuration and exit");

  Common run_opts;
  std::vector<std::string> profile;
  int profile_points = 360;
  CLI::App* run_cmd = app.add_subcommand("run", "simulate one configuration and write its artifacts");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--inductance-profile", profile, "write one inductance entry over a revolution: BLOCK I J")
      ->expected(3);
  run_cmd->add_option("--profile-points", profile_points, "angles per revolution for --inductance-profile")
      ->check(CLI::PositiveNumber);

  Common sweep_opts;
  std::string axis;
  std::vector<double> values;
  int workers = 1;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run one simulation per value of a fault parameter");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis, "swept parameter")
      ->required()
      ->check(CLI::IsMember({"delta_s", "delta_d", "broken_bars"}));
  sweep_cmd->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  sweep_cmd->add_option("--workers,-j", workers, "parallel runs")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (print_config) {
      fmt::print("{}", cagesim::to_yaml(cagesim::default_config()));
      return 0;
    }
    if (run_cmd->parsed()) {
      const cagesim::RunConfig cfg = effective(run_opts);
      if (!profile.empty()) {
        const std::string path = (std::filesystem::path(cfg.outputs.directory) /
                                  fmt::format("inductance_{}_{}_{}.csv", profile[0], profile[1], profile[2]))
                                     .string();
        int i = 0, j = 0;
        try {
          i = std::stoi(profile[1]);
          j = std::stoi(profile[2]);
        } catch (const std::exception&) {
          throw cagesim::ConfigError("entry indices must be integers", "inductance-profile");
        }
        cagesim::write_inductance_profile(cfg, profile[0], i, j, path, profile_points);
        fmt::print("wrote {}\n", path);
        return 0;
      }
      const cagesim::RunResult r = cagesim::run(cfg);
      report(r);
      fmt::print("artifacts in {}\n", cfg.outputs.directory);
      if (!r.analysed) {
        fmt::print(stderr, "spectrum skipped: {}\n", r.analysis_error);
        return 3;
      }
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const cagesim::RunConfig cfg = effective(sweep_opts);
      const auto result = cagesim::sweep(cfg, cagesim::sweep_axis_from_string(axis), values, workers);
      int failed = 0;
      for (const auto& p : result.points) {
        if (p.ok) {
          fmt::print("{} = {}: slip {:.5f}  settle {:.4f} s  first overshoot {:.4f} s{}\n", axis, p.value,
                     p.metrics.slip, p.metrics.settle_time, p.metrics.first_overshoot_time,
                     p.analysed ? "" : "  (spectrum skipped)");
        } else {
          ++failed;
          fmt::print(stderr, "{} = {}: failed: {}\n", axis, p.value, p.error);
        }
      }
      fmt::print("summary in {}\n", (std::filesystem::path(cfg.outputs.directory) / "sweep.csv").string());
      return failed == 0 ? 0 : 4;
    }
    fmt::print("{}", app.help());
    return 0;
  } catch (const cagesim::ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return 2;
  } catch (const cagesim::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
