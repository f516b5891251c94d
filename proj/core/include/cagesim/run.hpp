#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cagesim/config.hpp"
#include "cagesim/dynamics.hpp"
#include "cagesim/spectrum.hpp"

namespace cagesim {

struct CalibrationResult {
  bool performed = false;
  bool converged = false;
  double load_torque = 0.0;  ///< N m used for the main run
  double slip = 0.0;         ///< slip of the last trial
  /// (load torque, slip) of every trial run, in order.
  std::vector<std::pair<double, double>> trials;
};

/// Secant search on motor.load_torque until the steady slip of a short run
/// is within calibration.tolerance of calibration.target_slip. Leaves the
/// config untouched when calibration is disabled.
CalibrationResult calibrate_load(RunConfig& config);

struct RunResult {
  RunConfig config;  ///< effective config, calibrated load included
  CalibrationResult calibration;
  SimulationRecord record;
  RunMetrics metrics;
  bool analysed = false;
  std::string analysis_error;  ///< why the spectrum was skipped
  SteadyWindow window;
  SpectrumRecord spectrum;
  std::vector<LabeledPeak> peaks;
};

/// Calibrates (when enabled), simulates and analyses one configuration
/// without touching the file system. A run that never settles still
/// returns its record and metrics, with analysed = false.
RunResult execute(const RunConfig& config);

/// Fault lines of one run: all families, at the run's measured slip.
std::vector<HarmonicPrediction> run_predictions(const RunConfig& config, double slip);

/// Manifest: every effective parameter plus the derived quantities.
std::string manifest_json(const RunResult& result);

/// Writes the selected artifacts into `directory` (created if missing).
void write_artifacts(const RunResult& result, const std::string& directory);

/// execute + write_artifacts into config.outputs.directory.
RunResult run(const RunConfig& config);

enum class SweepAxis { DeltaS, DeltaD, BrokenBars };
std::string to_string(SweepAxis axis);  ///< delta_s / delta_d / broken_bars
SweepAxis sweep_axis_from_string(const std::string& name);

/// Config of one sweep point. Broken-bar values are counts m, placed as
/// the contiguous run 1..m.
RunConfig sweep_point(const RunConfig& base, SweepAxis axis, double value);

struct SweepPoint {
  double value = 0.0;
  std::string directory;
  bool ok = false;
  std::string error;
  bool analysed = false;
  RunMetrics metrics;
  double load_torque = 0.0;
  std::vector<LabeledPeak> peaks;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::DeltaS;
  std::vector<SweepPoint> points;  ///< in the order of the requested values
};

/// One run per value on `workers` threads, each writing to its own
/// subdirectory of base.outputs.directory. A failing point is recorded
/// and the sweep carries on. Writes sweep.csv and sweep.json at the end.
SweepResult sweep(const RunConfig& base, SweepAxis axis, const std::vector<double>& values, int workers = 1);

/// Sampled inductance entry over one mechanical revolution. `block` is
/// Ls, Lr, Lsr or Lrs; i and j are 1-based. Columns: theta_rad, value_H,
/// dvalue_H_per_rad.
void write_inductance_profile(const RunConfig& config, const std::string& block, int i, int j,
                              const std::string& path, int points = 360);

}  // namespace cagesim
