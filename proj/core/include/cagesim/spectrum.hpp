#pragma once

#include <string>
#include <vector>

#include "cagesim/dynamics.hpp"

namespace cagesim {

enum class Family {
  Ecc0,       ///< (1 +- (1 - s)/p) f0 and other k = 0 eccentricity lines
  PSH,        ///< principal slot harmonics (k R (1 - s)/p +- eta) f0
  Ecc1,       ///< slot harmonics shifted by the eccentricity order
  BrokenBar,  ///< (1 +- 2 s) f0
};

std::string to_string(Family family);
Family family_from_string(const std::string& name);

struct HarmonicPrediction {
  Family family = Family::Ecc0;
  int k = 0;        ///< rotor slot order
  int nd = 0;       ///< signed eccentricity order
  int eta = 0;      ///< signed supply time-harmonic order
  double hz = 0.0;
};

/// Lines of [(k R +- nd)(1 - s)/p +- eta] f0 for k = 0..k_max, nd = 0..nd_max
/// and odd eta up to eta_max, plus the broken-bar pair (1 +- 2s) f0. Only
/// positive, distinct frequencies are kept; the supply lines (k = nd = 0) are
/// not a fault family and are skipped. Result is sorted by family then hz.
std::vector<HarmonicPrediction> fault_harmonics(double f0, double slip, int pole_pairs, int bars,
                                                int nd_max = 1, int k_max = 1, int eta_max = 1);

/// The predictions of one family only.
std::vector<HarmonicPrediction> family_lines(const std::vector<HarmonicPrediction>& all, Family family);

struct LabeledPeak {
  Family family = Family::Ecc0;
  double predicted_hz = 0.0;
  double measured_hz = 0.0;  ///< NaN when absent
  double mag_db = 0.0;       ///< peak level, or the local floor when absent
  double floor_db = 0.0;
  bool present = false;
};

struct SpectrumOptions {
  bool hann = false;           ///< amplitude-corrected Hann window
  double fundamental = 50.0;   ///< Hz, sets the minimum window length
  int min_periods = 20;
};

/// One-sided amplitude spectrum: bin k of a unit sinusoid reads 1 (0 dB).
struct SpectrumRecord {
  std::vector<double> f;       ///< Hz
  std::vector<double> mag;     ///< amplitude, 2|X|/N (|X|/N at DC and Nyquist)
  std::vector<double> mag_db;  ///< 20 log10 of mag, floored at 1e-12
  double resolution = 0.0;     ///< Hz per bin
  double sample_rate = 0.0;
  std::size_t samples = 0;
  bool hann = false;
  double fundamental = 0.0;    ///< Hz; its bin is never reported as a fault line
  std::vector<LabeledPeak> labeled_peaks;

  std::size_t nearest_bin(double hz) const;
};

inline constexpr double kMagnitudeFloor = 1e-12;

/// FFT of a power-of-two window. Throws WindowError for a length that is not
/// a power of two or spans fewer than min_periods of the fundamental.
SpectrumRecord compute_spectrum(const std::vector<double>& signal, double sample_rate,
                                const SpectrumOptions& options = {});

/// Local-maximum search within +-tolerance_bins of each prediction, skipping
/// DC and the fundamental bin. A line
/// counts as present when its bin is a local maximum standing at least
/// `prominence_db` above the median level of the surrounding bins.
std::vector<LabeledPeak> measure_family(const SpectrumRecord& spectrum,
                                        const std::vector<HarmonicPrediction>& predicted,
                                        int tolerance_bins = 2, double prominence_db = 6.0);

/// Last half of a run cut to the longest power-of-two tail. The run counts
/// as settled when the mean speeds of the two quarters making up that half
/// differ by less than `max_speed_drift` of the mean; periodic ripple such as
/// the twice-slip oscillation of a broken cage does not count as drift.
/// Throws WindowError otherwise.
struct SteadyWindow {
  std::size_t first = 0;
  std::size_t count = 0;
  double speed_ripple = 0.0;  ///< std / mean over the last half
  double speed_drift = 0.0;   ///< |mean(q4) - mean(q3)| / mean
};
SteadyWindow steady_window(const SimulationRecord& record, double max_speed_drift = 1e-3);

/// Phase-A current over a steady window.
std::vector<double> phase_current(const SimulationRecord& record, const SteadyWindow& window,
                                  int phase = 0);

}  // namespace cagesim
