#include "cagesim/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "cagesim/error.hpp"
#include "cagesim/io.hpp"
#include "cagesim/model.hpp"

namespace cagesim {
namespace {

using json = nlohmann::ordered_json;

json number(double v) { return std::isfinite(v) ? json(v) : json(); }

// Scalars keep their YAML spelling type: bool, then integer, then double.
json yaml_to_json(const YAML::Node& node) {
  if (node.IsMap()) {
    json j = json::object();
    for (const auto& kv : node) j[kv.first.as<std::string>()] = yaml_to_json(kv.second);
    return j;
  }
  if (node.IsSequence()) {
    json j = json::array();
    for (const auto& v : node) j.push_back(yaml_to_json(v));
    return j;
  }
  if (node.IsNull()) return json();
  if (node.Tag() == "!") return node.Scalar();  // quoted
  bool b;
  if (YAML::convert<bool>::decode(node, b)) return b;
  long long i;
  if (YAML::convert<long long>::decode(node, i)) return i;
  double d;
  if (YAML::convert<double>::decode(node, d)) return d;
  return node.Scalar();
}

json metrics_json(const RunMetrics& m, double load) {
  json j;
  j["slip"] = number(m.slip);
  j["mean_speed_rad_s"] = number(m.mean_speed);
  j["speed_ripple"] = number(m.speed_ripple);
  j["mean_torque_nm"] = number(m.mean_torque);
  j["torque_error"] = load != 0.0 ? number((m.mean_torque - load) / load) : json();
  j["current_rms_a"] = number(m.current_rms);
  j["peak_current_a"] = number(m.peak_current);
  j["settle_time_s"] = number(m.settle_time);
  j["first_overshoot_time_s"] = number(m.first_overshoot_time);
  j["first_overshoot_speed_rad_s"] = number(m.first_overshoot_speed);
  return j;
}

json peaks_json(const std::vector<LabeledPeak>& peaks) {
  json list = json::array();
  for (const LabeledPeak& p : peaks) {
    json j;
    j["family"] = to_string(p.family);
    j["predicted_hz"] = p.predicted_hz;
    j["measured_hz"] = number(p.measured_hz);
    j["mag_db"] = p.mag_db;
    j["floor_db"] = p.floor_db;
    j["present"] = p.present;
    list.push_back(j);
  }
  return list;
}

double trial_slip(const RunConfig& config, double load) {
  MotorParameters motor = config.motor;
  motor.load_torque = load;
  SimulationOptions sim = config.sim;
  sim.t_end = config.calibration.t_end;
  const SimulationRecord rec = simulate(motor, config.fault, config.supply, sim);
  return run_metrics(rec, motor, config.supply).slip;
}

// Label of every line: family plus its rank within the family.
std::vector<std::string> peak_labels(const std::vector<LabeledPeak>& peaks) {
  std::map<Family, int> rank;
  std::vector<std::string> out;
  for (const LabeledPeak& p : peaks) out.push_back(fmt::format("{}_{}", to_string(p.family), ++rank[p.family]));
  return out;
}

}  // namespace

CalibrationResult calibrate_load(RunConfig& config) {
  CalibrationResult c;
  c.load_torque = config.motor.load_torque;
  if (!config.calibration.enabled) return c;
  config.validate();
  c.performed = true;
  const double target = config.calibration.target_slip;

  double t0 = config.motor.load_torque;
  double s0 = trial_slip(config, t0);
  c.trials.emplace_back(t0, s0);
  // Slip is close to proportional to load below breakdown.
  double t1 = s0 > 0.0 ? t0 * target / s0 : t0 + 1.0;
  for (int it = 1; it < config.calibration.max_iterations && std::abs(s0 - target) > config.calibration.tolerance;
       ++it) {
    const double s1 = trial_slip(config, t1);
    c.trials.emplace_back(t1, s1);
    const double slope = (s1 - s0) / (t1 - t0);
    t0 = t1;
    s0 = s1;
    if (!(std::abs(slope) > 0.0) || !std::isfinite(slope)) break;
    t1 = t0 + (target - s0) / slope;
  }
  c.load_torque = t0;
  c.slip = s0;
  c.converged = std::abs(s0 - target) <= config.calibration.tolerance;
  config.motor.load_torque = t0;
  return c;
}

std::vector<HarmonicPrediction> run_predictions(const RunConfig& config, double slip) {
  return fault_harmonics(config.supply.frequency, slip, config.motor.pole_pairs, config.motor.bars,
                         config.analysis.nd_max, config.analysis.k_max, config.analysis.eta_max);
}

RunResult execute(const RunConfig& config) {
  RunResult r;
  r.config = config;
  r.config.validate();
  r.calibration = calibrate_load(r.config);
  r.record = simulate(r.config.motor, r.config.fault, r.config.supply, r.config.sim);
  r.metrics = run_metrics(r.record, r.config.motor, r.config.supply);
  try {
    r.window = steady_window(r.record, r.config.analysis.max_speed_drift);
    SpectrumOptions so;
    so.hann = r.config.analysis.hann;
    so.fundamental = r.config.supply.frequency;
    r.spectrum = compute_spectrum(phase_current(r.record, r.window, r.config.analysis.phase),
                                  r.record.sample_rate, so);
    r.peaks = measure_family(r.spectrum, run_predictions(r.config, r.metrics.slip),
                             r.config.analysis.tolerance_bins, r.config.analysis.prominence_db);
    r.spectrum.labeled_peaks = r.peaks;
    r.analysed = true;
  } catch (const WindowError& e) {
    r.analysis_error = e.what();
  }
  return r;
}

std::string manifest_json(const RunResult& r) {
  json m;
  m["format"] = "cagesim-manifest";
  m["version"] = 1;
  m["config"] = yaml_to_json(YAML::Load(to_yaml(r.config)));

  json cal;
  cal["performed"] = r.calibration.performed;
  cal["converged"] = r.calibration.converged;
  cal["target_slip"] = r.config.calibration.target_slip;
  cal["load_torque_nm"] = r.config.motor.load_torque;
  cal["trial_slip"] = r.calibration.performed ? number(r.calibration.slip) : json();
  json trials = json::array();
  for (const auto& [load, slip] : r.calibration.trials) trials.push_back({{"load_torque_nm", load}, {"slip", slip}});
  cal["trials"] = trials;
  m["calibration"] = cal;

  json sim;
  sim["samples"] = r.record.size();
  sim["sample_rate_hz"] = r.record.sample_rate;
  sim["rotor_loops"] = r.record.rotor_loops();
  sim["integrator_steps"] = r.record.steps;
  m["simulation"] = sim;
  m["metrics"] = metrics_json(r.metrics, r.config.motor.load_torque);

  json a;
  a["analysed"] = r.analysed;
  if (r.analysed) {
    a["window_first_sample"] = r.window.first;
    a["window_samples"] = r.window.count;
    a["window_speed_ripple"] = r.window.speed_ripple;
    a["window_speed_drift"] = r.window.speed_drift;
    a["resolution_hz"] = r.spectrum.resolution;
    a["hann"] = r.spectrum.hann;
    a["peaks"] = peaks_json(r.peaks);
  } else {
    a["error"] = r.analysis_error;
  }
  m["analysis"] = a;
  return m.dump(2) + "\n";
}

void write_artifacts(const RunResult& r, const std::string& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create '" + directory + "': " + ec.message());
  const std::filesystem::path dir(directory);
  const OutputSelection& o = r.config.outputs;
  if (o.timeseries) write_timeseries_csv((dir / "timeseries.csv").string(), r.record);
  if (o.binary) write_record_binary((dir / "record.bin").string(), r.record);
  if (r.analysed && o.spectrum) write_spectrum_csv((dir / "spectrum.csv").string(), r.spectrum);
  if (r.analysed && o.peaks) write_peaks_json((dir / "peaks.json").string(), r.peaks);
  if (o.manifest) write_text((dir / "manifest.json").string(), manifest_json(r));
}

RunResult run(const RunConfig& config) {
  RunResult r = execute(config);
  write_artifacts(r, config.outputs.directory);
  return r;
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::DeltaS: return "delta_s";
    case SweepAxis::DeltaD: return "delta_d";
    case SweepAxis::BrokenBars: return "broken_bars";
  }
  return "";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  for (SweepAxis a : {SweepAxis::DeltaS, SweepAxis::DeltaD, SweepAxis::BrokenBars}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("expected delta_s, delta_d or broken_bars, got '" + name + "'", "axis");
}

RunConfig sweep_point(const RunConfig& base, SweepAxis axis, double value) {
  RunConfig c = base;
  switch (axis) {
    case SweepAxis::DeltaS: c.fault.eccentricity.delta_s = value; break;
    case SweepAxis::DeltaD: c.fault.eccentricity.delta_d = value; break;
    case SweepAxis::BrokenBars: {
      if (value < 0.0 || value != std::floor(value)) throw ConfigError("bar count must be a whole number >= 0", "values");
      c.fault.broken_bars.clear();
      for (int k = 1; k <= static_cast<int>(value); ++k) c.fault.broken_bars.push_back(k);
      break;
    }
  }
  c.outputs.directory =
      (std::filesystem::path(base.outputs.directory) / fmt::format("{}_{}", to_string(axis), format_double(value)))
          .string();
  return c;
}

SweepResult sweep(const RunConfig& base, SweepAxis axis, const std::vector<double>& values, int workers) {
  if (values.empty()) throw ConfigError("at least one value is required", "values");
  if (workers < 1) throw ConfigError("must be >= 1", "workers");
  std::vector<RunConfig> configs;
  for (double v : values) configs.push_back(sweep_point(base, axis, v));

  SweepResult result;
  result.axis = axis;
  result.points.resize(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      SweepPoint& p = result.points[k];
      p.value = values[k];
      p.directory = configs[k].outputs.directory;
      try {
        const RunResult r = run(configs[k]);
        p.ok = true;
        p.analysed = r.analysed;
        if (!r.analysed) p.error = r.analysis_error;
        p.metrics = r.metrics;
        p.load_torque = r.config.motor.load_torque;
        p.peaks = r.peaks;
      } catch (const std::exception& e) {
        p.error = e.what();
      }
    }
  };
  const int n = std::min<int>(workers, static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  // Summary table: one row per point, one column per fault line.
  std::vector<std::string> labels;
  for (const SweepPoint& p : result.points) {
    if (p.analysed) {
      labels = peak_labels(p.peaks);
      break;
    }
  }
  std::string csv = fmt::format(
      "# cagesim sweep v1\n{},ok,load_torque,slip,settle_time,first_overshoot_time,current_rms,peak_current",
      to_string(axis));
  for (const std::string& l : labels) csv += fmt::format(",{}_hz,{}_db", l, l);
  csv += "\n";
  json points = json::array();
  for (const SweepPoint& p : result.points) {
    const RunMetrics& m = p.metrics;
    csv += fmt::format("{},{},", format_double(p.value), p.ok ? 1 : 0);
    if (p.ok) {
      csv += fmt::format("{},{},{},{},{},{}", p.load_torque, m.slip, m.settle_time, m.first_overshoot_time,
                         m.current_rms, m.peak_current);
    } else {
      csv += ",,,,,";
    }
    const bool same = p.analysed && p.peaks.size() == labels.size();
    for (std::size_t k = 0; k < labels.size(); ++k) {
      csv += same ? fmt::format(",{},{}", p.peaks[k].predicted_hz, p.peaks[k].mag_db) : std::string(",,");
    }
    csv += "\n";

    json j;
    j["value"] = p.value;
    j["directory"] = p.directory;
    j["ok"] = p.ok;
    j["analysed"] = p.analysed;
    j["error"] = p.error.empty() ? json() : json(p.error);
    if (p.ok) {
      j["load_torque_nm"] = p.load_torque;
      j["metrics"] = metrics_json(m, p.load_torque);
      j["peaks"] = peaks_json(p.peaks);
    }
    points.push_back(j);
  }
  json doc;
  doc["format"] = "cagesim-sweep";
  doc["version"] = 1;
  doc["axis"] = to_string(axis);
  doc["base_config"] = yaml_to_json(YAML::Load(to_yaml(base)));
  doc["points"] = points;

  std::error_code ec;
  std::filesystem::create_directories(base.outputs.directory, ec);
  if (ec) throw IoError("cannot create '" + base.outputs.directory + "': " + ec.message());
  const std::filesystem::path dir(base.outputs.directory);
  write_text((dir / "sweep.csv").string(), csv);
  write_text((dir / "sweep.json").string(), doc.dump(2) + "\n");
  return result;
}

void write_inductance_profile(const RunConfig& config, const std::string& block, int i, int j,
                              const std::string& path, int points) {
  config.motor.validate();
  config.fault.eccentricity.validate();
  if (points < 2) throw ConfigError("must be >= 2", "points");
  const int n = config.motor.bars;
  int rows = 0, cols = 0;
  if (block == "Ls") {
    rows = cols = 3;
  } else if (block == "Lr") {
    rows = cols = n;
  } else if (block == "Lsr") {
    rows = 3;
    cols = n;
  } else if (block == "Lrs") {
    rows = n;
    cols = 3;
  } else {
    throw ConfigError("expected Ls, Lr, Lsr or Lrs, got '" + block + "'", "block");
  }
  if (i < 1 || i > rows || j < 1 || j > cols) {
    throw IndexError(fmt::format("{} entry ({}, {}) outside 1..{} x 1..{}", block, i, j, rows, cols));
  }

  const InductanceModel model(config.motor, config.fault.eccentricity, config.sim.model.inductance);
  std::string csv = fmt::format("{}\n# block {} entry {} {}\ntheta_rad,value_H,dvalue_H_per_rad\n", kProfileHeader,
                                block, i, j);
  InductanceBundle b;
  for (int k = 0; k < points; ++k) {
    const double theta = kTwoPi * k / points;
    model.evaluate(theta, b);
    double v = 0.0, d = 0.0;
    if (block == "Ls") {
      v = b.Ls(i - 1, j - 1);
      d = b.dLs(i - 1, j - 1);
    } else if (block == "Lr") {
      v = b.Lr(i - 1, j - 1);
      d = b.dLr(i - 1, j - 1);
    } else if (block == "Lsr") {
      v = b.Lsr(i - 1, j - 1);
      d = b.dLsr(i - 1, j - 1);
    } else {
      v = b.Lsr(j - 1, i - 1);
      d = b.dLsr(j - 1, i - 1);
    }
    csv += fmt::format("{},{},{}\n", theta, v, d);
  }
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  write_text(path, csv);
}

}  // namespace cagesim
