#pragma once

#include <string>
#include <vector>

#include "cagesim/dynamics.hpp"
#include "cagesim/spectrum.hpp"

namespace cagesim {

/// Column contracts; the first line of every CSV names the contract.
inline constexpr const char* kTimeseriesHeader = "# cagesim timeseries v1";
inline constexpr const char* kSpectrumHeader = "# cagesim spectrum v1";
inline constexpr const char* kProfileHeader = "# cagesim inductance-profile v1";

/// t, ia, ib, ic, omega, torque, theta. Values use round-trip precision.
void write_timeseries_csv(const std::string& path, const SimulationRecord& record);
/// f_hz, mag_db.
void write_spectrum_csv(const std::string& path, const SpectrumRecord& spectrum);
/// {"version": 1, "peaks": [{family, predicted_hz, measured_hz, mag_db, floor_db, present}]};
/// measured_hz is null for an absent line.
void write_peaks_json(const std::string& path, const std::vector<LabeledPeak>& peaks);

/// Little-endian dump of a whole record, rotor currents included.
void write_record_binary(const std::string& path, const SimulationRecord& record);
SimulationRecord read_record_binary(const std::string& path);

void write_text(const std::string& path, const std::string& text);

/// Shortest text that reads back to the same double.
std::string format_double(double value);

}  // namespace cagesim
