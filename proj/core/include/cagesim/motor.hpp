#pragma once

#include "cagesim/geometry.hpp"
#include "cagesim/winding.hpp"

namespace cagesim {

/// Electrical, magnetic, geometric and mechanical constants of the machine.
/// Defaults describe the 3 kW-class 4-pole, 40-bar reference motor.
struct MotorParameters {
  int phases = 3;
  int bars = 40;
  int pole_pairs = 2;
  int turns = 56;

  double stator_resistance = 1.75;     // ohm
  double bar_resistance = 31e-6;       // ohm
  double end_ring_resistance = 2.2e-6; // ohm, one segment
  double stator_leakage = 0.009;       // H
  double bar_leakage = 95e-9;          // H
  double end_ring_leakage = 18e-9;     // H

  double gamma_bar = kPi / 86.0;
  double gamma_skew = kPi / 86.0;

  double rotor_radius = 0.082;  // m
  double stack_length = 0.11;   // m
  double air_gap = 0.0008;      // m

  double inertia = 0.05;        // kg m^2
  double load_torque = 20.0;    // N m

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  WindingLayout layout() const;
  GapGeometry geometry() const;
  /// Uniform-gap inductance scale mu0 r0 l / g0 (H).
  double l0() const;
};

struct Supply {
  double peak_voltage = 380.0;  // V, phase peak
  double frequency = 50.0;      // Hz

  void validate() const;
  double omega() const { return kTwoPi * frequency; }
};

}  // namespace cagesim
