#include "cagesim/geometry.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "cagesim/error.hpp"

namespace cagesim {

void EccentricityConfig::validate() const {
  if (!std::isfinite(delta_s) || delta_s < 0.0) {
    throw ConfigError("must be a finite value >= 0", "delta_s");
  }
  if (!std::isfinite(delta_d) || delta_d < 0.0) {
    throw ConfigError("must be a finite value >= 0", "delta_d");
  }
  if (!std::isfinite(alpha_s0) || !std::isfinite(alpha_d0)) {
    throw ConfigError("eccentricity angles must be finite", "alpha");
  }
  if (delta_s + delta_d >= 1.0) {
    throw RotorContactError("delta_s + delta_d = " + std::to_string(delta_s + delta_d) +
                            " puts the rotor in contact with the stator");
  }
}

double GapState::permeance(double phi) const {
  const double psi = phi - alpha;
  return A + B * std::cos(psi) + C * std::cos(2.0 * psi);
}

double GapState::permeance_dtheta(double phi) const {
  const double psi = phi - alpha;
  return dA + dB * std::cos(psi) + dC * std::cos(2.0 * psi) +
         dAlpha * (B * std::sin(psi) + 2.0 * C * std::sin(2.0 * psi));
}

GapGeometry GapGeometry::from_rotor(double rotor_radius, double gap) {
  if (!(rotor_radius > 0.0) || !(gap > 0.0)) {
    throw ConfigError("rotor radius and gap must be positive", "geometry");
  }
  GapGeometry g;
  g.R_r = rotor_radius;
  g.g0 = gap;
  g.R_s = rotor_radius + gap;
  g.r0 = 0.5 * (g.R_s + g.R_r);
  g.P0 = kMu0 * g.r0 / g.g0;
  return g;
}

PolarEccentricity composite_eccentricity(const EccentricityConfig& cfg, double theta) {
  const std::complex<double> z = std::polar(cfg.delta_s, cfg.alpha_s0) +
                                 std::polar(cfg.delta_d, cfg.alpha_d0 + theta);
  return {std::abs(z), std::atan2(z.imag(), z.real())};
}

PermeanceCoefficients permeance_coefficients(double delta) {
  if (!(delta < 1.0)) {
    throw RotorContactError("eccentricity degree " + std::to_string(delta) + " >= 1");
  }
  if (delta < kConcentricThreshold) return {};
  const double s = std::sqrt(1.0 - delta * delta);
  const double A = 1.0 / s;
  // (1 - s)/delta without the cancellation near delta = 0
  const double q = delta / (1.0 + s);
  return {A, 2.0 * A * q, 2.0 * A * q * q};
}

double gap_length(const GapGeometry& geom, double delta, double alpha, double phi) {
  return geom.g0 * (1.0 - delta * std::cos(phi - alpha));
}

double exact_gap_length(const GapGeometry& geom, double delta, double alpha, double phi) {
  const double e = delta * geom.g0;
  const double psi = phi - alpha;
  const double sn = e * std::sin(psi);
  return geom.R_s - e * std::cos(psi) - std::sqrt(geom.R_r * geom.R_r - sn * sn);
}

GapState gap_state(const EccentricityConfig& cfg, double theta) {
  const std::complex<double> dyn = std::polar(cfg.delta_d, cfg.alpha_d0 + theta);
  const std::complex<double> z = std::polar(cfg.delta_s, cfg.alpha_s0) + dyn;
  const std::complex<double> dz = std::complex<double>(0.0, 1.0) * dyn;

  GapState g;
  g.delta = std::abs(z);
  g.alpha = std::atan2(z.imag(), z.real());
  if (g.delta < kConcentricThreshold) {
    g.delta = 0.0;
    return g;
  }

  const PermeanceCoefficients pc = permeance_coefficients(g.delta);
  g.A = pc.A;
  g.B = pc.B;
  g.C = pc.C;

  const std::complex<double> w = std::conj(z) * dz;
  g.dDelta = w.real() / g.delta;
  g.dAlpha = w.imag() / (g.delta * g.delta);

  const double d = g.delta;
  const double s = std::sqrt(1.0 - d * d);
  const double q = d / (1.0 + s);
  const double dA_dd = d / (s * s * s);
  const double dq_dd = 1.0 / (s * (1.0 + s));
  g.dA = dA_dd * g.dDelta;
  g.dB = 2.0 * (dA_dd * q + g.A * dq_dd) * g.dDelta;
  g.dC = 2.0 * (dA_dd * q * q + 2.0 * g.A * q * dq_dd) * g.dDelta;
  return g;
}

}  // namespace cagesim
