#pragma once

#include <string>

#include "cagesim/dynamics.hpp"
#include "cagesim/motor.hpp"

namespace cagesim {

struct OutputSelection {
  std::string directory = "cagesim-out";
  bool timeseries = true;  ///< timeseries.csv
  bool spectrum = true;    ///< spectrum.csv
  bool peaks = true;       ///< peaks.json
  bool binary = false;     ///< record.bin
  bool manifest = true;    ///< manifest.json
};

struct AnalysisOptions {
  bool hann = false;
  int phase = 0;               ///< stator phase fed to the spectrum
  int nd_max = 1;
  int k_max = 1;
  int eta_max = 1;
  int tolerance_bins = 2;
  double prominence_db = 6.0;
  double max_speed_drift = 1e-3;
};

/// Optional secant search on the load torque for a target steady slip.
struct LoadCalibration {
  bool enabled = false;
  double target_slip = 0.015;
  double tolerance = 2e-4;  ///< absolute slip
  int max_iterations = 6;
  double t_end = 2.0;       ///< s, length of each trial run
};

struct RunConfig {
  std::string profile = "reference-4pole-40bar";
  MotorParameters motor;
  FaultSpec fault;
  Supply supply;
  SimulationOptions sim;
  OutputSelection outputs;
  AnalysisOptions analysis;
  LoadCalibration calibration;

  /// Throws ConfigError (or a more specific error) naming the field.
  void validate() const;
};

/// The built-in profile: reference motor, healthy cage, concentric gap.
RunConfig default_config();

/// Overlays a YAML document on the defaults. Unknown sections or keys and
/// ill-typed values throw ConfigError with the dotted key path as field.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);

/// Every effective parameter in the same schema parse_config reads.
std::string to_yaml(const RunConfig& config);

std::string to_string(BarModel model);        ///< "scale" / "eliminate"
BarModel bar_model_from_string(const std::string& name);

}  // namespace cagesim
