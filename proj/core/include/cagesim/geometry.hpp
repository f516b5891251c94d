#pragma once

// Air-gap description of an eccentric rotor: composite eccentricity vector,
// gap length, and the three-term permeance series
//   P(phi) = P0 * (A + B cos(phi - alpha) + C cos 2(phi - alpha)).

namespace cagesim {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kMu0 = 4.0e-7 * kPi;

/// Composite eccentricity below this degree is treated as a concentric gap.
inline constexpr double kConcentricThreshold = 1e-12;

struct EccentricityConfig {
  double delta_s = 0.0;   ///< static degree, fraction of g0
  double delta_d = 0.0;   ///< dynamic degree, fraction of g0
  double alpha_s0 = 0.0;  ///< static displacement angle (rad)
  double alpha_d0 = 0.0;  ///< dynamic displacement angle at theta = 0 (rad)

  /// Throws ConfigError for negative degrees and RotorContactError when
  /// delta_s + delta_d >= 1.
  void validate() const;
  bool concentric() const { return delta_s == 0.0 && delta_d == 0.0; }
};

struct PolarEccentricity {
  double delta = 0.0;
  double alpha = 0.0;
};

struct PermeanceCoefficients {
  double A = 1.0;
  double B = 0.0;
  double C = 0.0;
};

/// Per-angle gap description with analytic theta-derivatives.
struct GapState {
  double delta = 0.0;
  double alpha = 0.0;
  double A = 1.0;
  double B = 0.0;
  double C = 0.0;
  double dDelta = 0.0;
  double dAlpha = 0.0;
  double dA = 0.0;
  double dB = 0.0;
  double dC = 0.0;

  /// Normalized permeance P(phi)/P0.
  double permeance(double phi) const;
  /// Partial derivative of P(phi)/P0 with respect to theta at fixed phi.
  double permeance_dtheta(double phi) const;

  static GapState concentric() { return {}; }
};

struct GapGeometry {
  double R_s = 0.0;
  double R_r = 0.0;
  double g0 = 0.0;
  double r0 = 0.0;
  double P0 = 0.0;

  /// Builds a consistent geometry from the rotor radius and uniform gap.
  static GapGeometry from_rotor(double rotor_radius, double gap);
};

/// Polar form of the static vector plus the rotating dynamic vector.
PolarEccentricity composite_eccentricity(const EccentricityConfig& cfg, double theta);

/// Throws RotorContactError for delta >= 1.
PermeanceCoefficients permeance_coefficients(double delta);

/// Simplified gap g0 (1 - delta cos(phi - alpha)).
double gap_length(const GapGeometry& geom, double delta, double alpha, double phi);

/// Gap from the exact circle-offset construction. Used to bound the error of
/// the simplified form.
double exact_gap_length(const GapGeometry& geom, double delta, double alpha, double phi);

GapState gap_state(const EccentricityConfig& cfg, double theta);

}  // namespace cagesim
