#include "cagesim/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "cagesim/error.hpp"

namespace cagesim {
namespace {

static_assert(std::endian::native == std::endian::little, "binary records assume a little-endian host");

constexpr std::array<char, 4> kMagic{'C', 'G', 'S', 'R'};
constexpr std::uint32_t kBinaryVersion = 1;

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError("'" + path + "' is truncated");
  return v;
}

}  // namespace

std::string format_double(double value) { return fmt::format("{}", value); }

void write_timeseries_csv(const std::string& path, const SimulationRecord& r) {
  std::ofstream out = open_out(path);
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\nt,ia,ib,ic,omega,torque,theta\n", kTimeseriesHeader);
  for (std::size_t k = 0; k < r.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{}\n", r.t[k], r.i_s(row, 0), r.i_s(row, 1),
                   r.i_s(row, 2), r.omega[k], r.torque[k], r.theta[k]);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(out, path);
}

void write_spectrum_csv(const std::string& path, const SpectrumRecord& s) {
  std::ofstream out = open_out(path);
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\nf_hz,mag_db\n", kSpectrumHeader);
  for (std::size_t k = 0; k < s.f.size(); ++k) fmt::format_to(std::back_inserter(buf), "{},{}\n", s.f[k], s.mag_db[k]);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(out, path);
}

void write_peaks_json(const std::string& path, const std::vector<LabeledPeak>& peaks) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const LabeledPeak& p : peaks) {
    nlohmann::ordered_json j;
    j["family"] = to_string(p.family);
    j["predicted_hz"] = p.predicted_hz;
    j["measured_hz"] = std::isnan(p.measured_hz) ? nlohmann::ordered_json() : nlohmann::ordered_json(p.measured_hz);
    j["mag_db"] = p.mag_db;
    j["floor_db"] = p.floor_db;
    j["present"] = p.present;
    list.push_back(j);
  }
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["peaks"] = list;
  write_text(path, doc.dump(2) + "\n");
}

void write_record_binary(const std::string& path, const SimulationRecord& r) {
  std::ofstream out = open_out(path, true);
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kBinaryVersion);
  put<std::uint64_t>(out, r.size());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(r.rotor_loops()));
  put<std::uint64_t>(out, r.steps);
  put<double>(out, r.sample_rate);
  auto column = [&](const double* data, std::size_t n) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  };
  const std::size_t n = r.size();
  column(r.t.data(), n);
  // Eigen stores column-major: each phase and loop is contiguous.
  column(r.i_s.data(), n * 3);
  column(r.i_r.data(), n * static_cast<std::size_t>(r.rotor_loops()));
  column(r.omega.data(), n);
  column(r.theta.data(), n);
  column(r.torque.data(), n);
  finish(out, path);
}

SimulationRecord read_record_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("'" + path + "' is not a cagesim record");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kBinaryVersion) throw IoError(fmt::format("'{}' has unsupported version {}", path, version));
  const auto n = get<std::uint64_t>(in, path);
  const auto loops = get<std::uint32_t>(in, path);
  SimulationRecord r;
  r.steps = get<std::uint64_t>(in, path);
  r.sample_rate = get<double>(in, path);
  auto column = [&](double* data, std::size_t count) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw IoError("'" + path + "' is truncated");
  };
  r.t.resize(n);
  r.i_s.resize(static_cast<Eigen::Index>(n), 3);
  r.i_r.resize(static_cast<Eigen::Index>(n), loops);
  r.omega.resize(n);
  r.theta.resize(n);
  r.torque.resize(n);
  column(r.t.data(), n);
  column(r.i_s.data(), n * 3);
  column(r.i_r.data(), n * loops);
  column(r.omega.data(), n);
  column(r.theta.data(), n);
  column(r.torque.data(), n);
  return r;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  finish(out, path);
}

}  // namespace cagesim
