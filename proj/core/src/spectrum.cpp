#include "cagesim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <unsupported/Eigen/FFT>

#include "cagesim/error.hpp"

namespace cagesim {

std::string to_string(Family family) {
  switch (family) {
    case Family::Ecc0: return "ecc0";
    case Family::PSH: return "psh";
    case Family::Ecc1: return "ecc1";
    case Family::BrokenBar: return "broken_bar";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::Ecc0, Family::PSH, Family::Ecc1, Family::BrokenBar}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown harmonic family '" + name + "'", "family");
}

std::vector<HarmonicPrediction> fault_harmonics(double f0, double slip, int pole_pairs, int bars,
                                                int nd_max, int k_max, int eta_max) {
  std::vector<HarmonicPrediction> out;
  auto add = [&](Family family, int k, int nd, int eta, double hz) {
    if (!(hz > 0.0) || !std::isfinite(hz)) return;
    for (const HarmonicPrediction& h : out) {
      if (h.family == family && std::abs(h.hz - hz) <= 1e-9 * hz) return;
    }
    out.push_back({family, k, nd, eta, hz});
  };
  const double rotor = (1.0 - slip) / pole_pairs;
  for (int k = 0; k <= k_max; ++k) {
    for (int nd = -nd_max; nd <= nd_max; ++nd) {
      if (k == 0 && nd == 0) continue;
      const Family family = k == 0 ? Family::Ecc0 : (nd == 0 ? Family::PSH : Family::Ecc1);
      for (int eta = -eta_max; eta <= eta_max; ++eta) {
        if (eta % 2 == 0) continue;
        add(family, k, nd, eta, ((k * bars + nd) * rotor + eta) * f0);
      }
    }
  }
  add(Family::BrokenBar, 0, 0, -1, (1.0 - 2.0 * slip) * f0);
  add(Family::BrokenBar, 0, 0, 1, (1.0 + 2.0 * slip) * f0);
  std::stable_sort(out.begin(), out.end(), [](const HarmonicPrediction& a, const HarmonicPrediction& b) {
    return a.family != b.family ? a.family < b.family : a.hz < b.hz;
  });
  return out;
}

std::vector<HarmonicPrediction> family_lines(const std::vector<HarmonicPrediction>& all, Family family) {
  std::vector<HarmonicPrediction> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out),
               [family](const HarmonicPrediction& h) { return h.family == family; });
  return out;
}

std::size_t SpectrumRecord::nearest_bin(double hz) const {
  const double k = std::round(hz / resolution);
  if (k <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(k), f.size() - 1);
}

SpectrumRecord compute_spectrum(const std::vector<double>& signal, double sample_rate,
                                const SpectrumOptions& options) {
  const std::size_t n = signal.size();
  if (n < 2 || (n & (n - 1)) != 0) {
    throw WindowError("window length " + std::to_string(n) + " is not a power of two");
  }
  if (!(sample_rate > 0.0)) throw WindowError("sample rate must be > 0");
  const double span = static_cast<double>(n) / sample_rate;
  if (span * options.fundamental < options.min_periods) {
    throw WindowError("window of " + std::to_string(span) + " s spans fewer than " +
                      std::to_string(options.min_periods) + " fundamental periods");
  }

  std::vector<double> x = signal;
  double gain = 1.0;
  if (options.hann) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
      x[k] *= w;
      sum += w;
    }
    gain = static_cast<double>(n) / sum;  // coherent-gain correction
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> X;
  fft.fwd(X, x);

  SpectrumRecord s;
  s.sample_rate = sample_rate;
  s.samples = n;
  s.hann = options.hann;
  s.fundamental = options.fundamental;
  s.resolution = sample_rate / static_cast<double>(n);
  const std::size_t half = n / 2;
  s.f.resize(half + 1);
  s.mag.resize(half + 1);
  s.mag_db.resize(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    const double scale = (k == 0 || k == half) ? 1.0 : 2.0;
    s.f[k] = static_cast<double>(k) * s.resolution;
    s.mag[k] = gain * scale * std::abs(X[k]) / static_cast<double>(n);
    s.mag_db[k] = 20.0 * std::log10(std::max(s.mag[k], kMagnitudeFloor));
  }
  return s;
}

std::vector<LabeledPeak> measure_family(const SpectrumRecord& spectrum,
                                        const std::vector<HarmonicPrediction>& predicted,
                                        int tolerance_bins, double prominence_db) {
  const auto last = static_cast<long>(spectrum.f.size()) - 1;
  const long context = 25;
  std::vector<LabeledPeak> out;
  for (const HarmonicPrediction& p : predicted) {
    LabeledPeak peak;
    peak.family = p.family;
    peak.predicted_hz = p.hz;
    peak.measured_hz = std::numeric_limits<double>::quiet_NaN();
    const auto centre = static_cast<long>(spectrum.nearest_bin(p.hz));
    // DC never counts as a peak.
    const long lo = std::max(1L, centre - tolerance_bins);
    const long hi = std::min(last, centre + tolerance_bins);

    std::vector<double> around;
    for (long k = std::max(1L, centre - context); k <= std::min(last, centre + context); ++k) {
      if (k < lo || k > hi) around.push_back(spectrum.mag_db[static_cast<std::size_t>(k)]);
    }
    if (!around.empty()) {
      std::nth_element(around.begin(), around.begin() + static_cast<long>(around.size() / 2), around.end());
      peak.floor_db = around[around.size() / 2];
    } else {
      peak.floor_db = 20.0 * std::log10(kMagnitudeFloor);
    }

    const long supply = spectrum.fundamental > 0.0
                            ? static_cast<long>(spectrum.nearest_bin(spectrum.fundamental))
                            : -1;
    long best = -1;
    for (long k = lo; k <= hi; ++k) {
      if (k == supply) continue;
      if (best < 0 || spectrum.mag_db[static_cast<std::size_t>(k)] > spectrum.mag_db[static_cast<std::size_t>(best)]) {
        best = k;
      }
    }
    if (best > 0 && best < last) {
      const double v = spectrum.mag_db[static_cast<std::size_t>(best)];
      const bool local_max = v >= spectrum.mag_db[static_cast<std::size_t>(best - 1)] &&
                             v >= spectrum.mag_db[static_cast<std::size_t>(best + 1)];
      if (local_max && v - peak.floor_db >= prominence_db) {
        peak.present = true;
        peak.measured_hz = spectrum.f[static_cast<std::size_t>(best)];
        peak.mag_db = v;
      }
    }
    if (!peak.present) peak.mag_db = peak.floor_db;
    out.push_back(peak);
  }
  return out;
}

SteadyWindow steady_window(const SimulationRecord& record, double max_speed_drift) {
  const std::size_t n = record.size();
  const std::size_t half = n / 2;
  if (half < 4) throw WindowError("record too short for a steady window");
  std::size_t count = 1;
  while (count * 2 <= half) count *= 2;

  auto mean_over = [&](std::size_t from, std::size_t to) {
    double m = 0.0;
    for (std::size_t k = from; k < to; ++k) m += record.omega[k];
    return m / static_cast<double>(to - from);
  };
  const std::size_t start = n - half;
  const double mean = mean_over(start, n);
  double var = 0.0;
  for (std::size_t k = start; k < n; ++k) var += std::pow(record.omega[k] - mean, 2);
  SteadyWindow w{n - count, count, std::sqrt(var / static_cast<double>(half)) / std::abs(mean), 0.0};
  w.speed_drift = std::abs(mean_over(start + half / 2, n) - mean_over(start, start + half / 2)) / std::abs(mean);
  if (!(w.speed_drift < max_speed_drift)) {
    throw WindowError("speed has not settled: mean speed moves by " + std::to_string(w.speed_drift) +
                      " (relative) across the last half, limit " + std::to_string(max_speed_drift));
  }
  return w;
}

std::vector<double> phase_current(const SimulationRecord& record, const SteadyWindow& window, int phase) {
  if (phase < 0 || phase > 2) throw IndexError("phase must be 0, 1 or 2");
  std::vector<double> out(window.count);
  for (std::size_t k = 0; k < window.count; ++k) {
    out[k] = record.i_s(static_cast<Eigen::Index>(window.first + k), phase);
  }
  return out;
}

}  // namespace cagesim
