#include "cagesim/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "cagesim/error.hpp"

namespace cagesim {
namespace {

using Target = std::variant<double*, int*, bool*, std::string*, std::vector<int>*, BarModel*, MutualMethod*>;

struct Key {
  const char* name;
  Target target;
};

struct Section {
  const char* name;
  std::vector<Key> keys;
};

// Key names follow the reference motor's data file where one exists.
std::vector<Section> schema(RunConfig& c) {
  MotorParameters& m = c.motor;
  InductanceOptions& ind = c.sim.model.inductance;
  return {
      {"motor",
       {{"m", &m.phases}, {"n", &m.bars}, {"p", &m.pole_pairs}, {"Ns", &m.turns},
        {"rst", &m.stator_resistance}, {"r_bar", &m.bar_resistance}, {"r_end", &m.end_ring_resistance},
        {"lls", &m.stator_leakage}, {"l_bar", &m.bar_leakage}, {"l_end", &m.end_ring_leakage},
        {"gama", &m.gamma_bar}, {"gamma_skew", &m.gamma_skew}, {"rot_rad", &m.rotor_radius},
        {"stack_length", &m.stack_length}, {"g", &m.air_gap}, {"J", &m.inertia}, {"Tl", &m.load_torque}}},
      {"supply", {{"Vs", &c.supply.peak_voltage}, {"f0", &c.supply.frequency}}},
      {"fault",
       {{"es", &c.fault.eccentricity.delta_s}, {"ed", &c.fault.eccentricity.delta_d},
        {"alpha_s0", &c.fault.eccentricity.alpha_s0}, {"alpha_d0", &c.fault.eccentricity.alpha_d0},
        {"broken_bars", &c.fault.broken_bars}, {"bar_model", &c.fault.bar_model},
        {"broken_factor", &c.fault.broken_factor}}},
      {"sim",
       {{"t_end", &c.sim.t_end}, {"RTol", &c.sim.rtol}, {"ATol", &c.sim.atol},
        {"sample_rate", &c.sim.sample_rate}, {"initial_step", &c.sim.initial_step},
        {"min_step", &c.sim.min_step}, {"skew", &ind.skew}, {"skew_self_blocks", &ind.skew_self_blocks},
        {"leakage", &ind.leakage}, {"mutual", &ind.mutual},
        {"isolated_neutral", &c.sim.model.isolated_neutral}}},
      {"outputs",
       {{"directory", &c.outputs.directory}, {"timeseries", &c.outputs.timeseries},
        {"spectrum", &c.outputs.spectrum}, {"peaks", &c.outputs.peaks}, {"binary", &c.outputs.binary},
        {"manifest", &c.outputs.manifest}}},
      {"analysis",
       {{"hann", &c.analysis.hann}, {"phase", &c.analysis.phase}, {"nd_max", &c.analysis.nd_max},
        {"k_max", &c.analysis.k_max}, {"eta_max", &c.analysis.eta_max},
        {"tolerance_bins", &c.analysis.tolerance_bins}, {"prominence_db", &c.analysis.prominence_db},
        {"max_speed_drift", &c.analysis.max_speed_drift}}},
      {"calibration",
       {{"enabled", &c.calibration.enabled}, {"target_slip", &c.calibration.target_slip},
        {"tolerance", &c.calibration.tolerance}, {"max_iterations", &c.calibration.max_iterations},
        {"t_end", &c.calibration.t_end}}},
  };
}

std::string mutual_name(MutualMethod m) { return m == MutualMethod::Exact ? "exact" : "local_permeance"; }

MutualMethod mutual_from_string(const std::string& s, const std::string& path) {
  if (s == "exact") return MutualMethod::Exact;
  if (s == "local_permeance") return MutualMethod::LocalPermeance;
  throw ConfigError("expected 'exact' or 'local_permeance', got '" + s + "'", path);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& path, const char* expected) {
  if (!node.IsScalar()) throw ConfigError(std::string("expected ") + expected, path);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("expected ") + expected + ", got '" + node.Scalar() + "'", path);
  }
}

void read(const YAML::Node& node, const std::string& path, const Target& target) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          *p = scalar<double>(node, path, "a number");
        } else if constexpr (std::is_same_v<T, int>) {
          *p = scalar<int>(node, path, "an integer");
        } else if constexpr (std::is_same_v<T, bool>) {
          *p = scalar<bool>(node, path, "true or false");
        } else if constexpr (std::is_same_v<T, std::string>) {
          *p = scalar<std::string>(node, path, "a string");
        } else if constexpr (std::is_same_v<T, std::vector<int>>) {
          if (node.IsNull()) {
            p->clear();
            return;
          }
          if (!node.IsSequence()) throw ConfigError("expected a list of integers", path);
          p->clear();
          for (std::size_t i = 0; i < node.size(); ++i) {
            p->push_back(scalar<int>(node[i], fmt::format("{}[{}]", path, i), "an integer"));
          }
        } else if constexpr (std::is_same_v<T, BarModel>) {
          try {
            *p = bar_model_from_string(scalar<std::string>(node, path, "a string"));
          } catch (const ConfigError& e) {
            if (!e.field().empty()) throw;
            throw ConfigError(e.what(), path);
          }
        } else {
          *p = mutual_from_string(scalar<std::string>(node, path, "a string"), path);
        }
      },
      target);
}

void write(YAML::Emitter& out, const Target& target) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          out << fmt::format("{}", *p);
        } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, bool>) {
          out << *p;
        } else if constexpr (std::is_same_v<T, std::string>) {
          out << YAML::DoubleQuoted << *p;
        } else if constexpr (std::is_same_v<T, std::vector<int>>) {
          out << YAML::Flow << YAML::BeginSeq;
          for (int v : *p) out << v;
          out << YAML::EndSeq;
        } else if constexpr (std::is_same_v<T, BarModel>) {
          out << to_string(*p);
        } else {
          out << mutual_name(*p);
        }
      },
      target);
}

void require(bool ok, const char* message, const char* field) {
  if (!ok) throw ConfigError(message, field);
}

}  // namespace

std::string to_string(BarModel model) {
  return model == BarModel::ResistanceScaling ? "scale" : "eliminate";
}

BarModel bar_model_from_string(const std::string& name) {
  if (name == "scale") return BarModel::ResistanceScaling;
  if (name == "eliminate") return BarModel::LoopElimination;
  throw ConfigError("expected 'scale' or 'eliminate', got '" + name + "'");
}

RunConfig default_config() { return RunConfig{}; }

void RunConfig::validate() const {
  if (profile != RunConfig{}.profile) throw ConfigError("unknown profile '" + profile + "'", "profile");
  motor.validate();
  supply.validate();
  fault.eccentricity.validate();
  fault.validate(motor.bars);
  sim.validate();
  require(!outputs.directory.empty(), "must not be empty", "outputs.directory");
  require(analysis.phase >= 0 && analysis.phase <= 2, "must be 0, 1 or 2", "analysis.phase");
  require(analysis.nd_max >= 0, "must be >= 0", "analysis.nd_max");
  require(analysis.k_max >= 0, "must be >= 0", "analysis.k_max");
  require(analysis.eta_max >= 1, "must be >= 1", "analysis.eta_max");
  require(analysis.tolerance_bins >= 0, "must be >= 0", "analysis.tolerance_bins");
  require(analysis.prominence_db >= 0.0, "must be >= 0", "analysis.prominence_db");
  require(analysis.max_speed_drift > 0.0, "must be > 0", "analysis.max_speed_drift");
  if (calibration.enabled) {
    require(calibration.target_slip > 0.0 && calibration.target_slip < 1.0, "must lie in (0, 1)",
            "calibration.target_slip");
    require(calibration.tolerance > 0.0, "must be > 0", "calibration.tolerance");
    require(calibration.max_iterations >= 1, "must be >= 1", "calibration.max_iterations");
    require(calibration.t_end > 0.0, "must be > 0", "calibration.t_end");
  }
}

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed YAML: ") + e.what());
  }
  RunConfig c = default_config();
  if (root.IsNull()) return c;
  if (!root.IsMap()) throw ConfigError("top level must be a mapping");

  std::vector<Section> sections = schema(c);
  for (const auto& entry : root) {
    const std::string name = entry.first.as<std::string>();
    if (name == "profile") {
      c.profile = scalar<std::string>(entry.second, name, "a string");
      continue;
    }
    auto sec = std::find_if(sections.begin(), sections.end(), [&](const Section& s) { return name == s.name; });
    if (sec == sections.end()) throw ConfigError("unknown section", name);
    if (entry.second.IsNull()) continue;
    if (!entry.second.IsMap()) throw ConfigError("expected a mapping", name);
    for (const auto& kv : entry.second) {
      const std::string key = kv.first.as<std::string>();
      const std::string path = name + "." + key;
      auto it = std::find_if(sec->keys.begin(), sec->keys.end(), [&](const Key& k) { return key == k.name; });
      if (it == sec->keys.end()) throw ConfigError("unknown key", path);
      read(kv.second, path, it->target);
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_yaml(const RunConfig& config) {
  RunConfig c = config;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "profile" << YAML::Value << c.profile;
  for (const Section& s : schema(c)) {
    out << YAML::Key << s.name << YAML::Value << YAML::BeginMap;
    for (const Key& k : s.keys) {
      out << YAML::Key << k.name << YAML::Value;
      write(out, k.target);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace cagesim
