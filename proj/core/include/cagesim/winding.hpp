#pragma once

#include <functional>
#include <vector>

#include "cagesim/geometry.hpp"

namespace cagesim {

/// Basic functions of the 3-phase 4-pole stator and the trapezoidal rotor loop.
///   AS  stator phase turn function, BS = AS^2, CS = AS(phi) AS(phi - 2pi/3)
///   AR  rotor loop turn function,   BR = AR^2, CR = AR(phi) AR(phi + 2pi/n)
enum class BasicFunction { AS, BS, CS, AR, BR, CR };

const char* to_string(BasicFunction kind);

inline bool is_stator(BasicFunction kind) {
  return kind == BasicFunction::AS || kind == BasicFunction::BS || kind == BasicFunction::CS;
}

struct WindingLayout {
  int turns = 56;                   ///< N; the stator turn function peaks at 2N
  int pole_pairs = 2;               ///< only 2 is supported
  int bars = 40;                    ///< n
  double gamma_bar = kPi / 86.0;    ///< angle over which a bar's MMF rises (rad)
  double gamma_skew = kPi / 86.0;   ///< rotor skew angle (rad)

  void validate() const;
  double bar_pitch() const { return kTwoPi / bars; }
};

double basic_function_value(BasicFunction kind, const WindingLayout& layout, double phi);

/// Phase or loop function obtained by shifting a basic function.
/// AS/BS: phase i in 1..3. AR/BR: loop i in 1..n. CR: product of loop i and
/// loop i-1 (cyclic).
double shifted(BasicFunction kind, const WindingLayout& layout, int i, double phi);
/// CS: product of phases i and j, i != j.
double shifted(BasicFunction kind, const WindingLayout& layout, int i, int j, double phi);

struct Harmonic {
  int k = 0;
  double a = 0.0;
  double b = 0.0;
};

/// f(phi) = a0 + sum_k a_k cos(m k phi) + b_k sin(m k phi), m = angular_multiplier.
struct FourierSeriesSet {
  double a0 = 0.0;
  std::vector<Harmonic> harmonics;
  int angular_multiplier = 1;

  double operator()(double phi) const;
};

/// Closed-form coefficients for orders 1..k_max. Requires k_max >= 2.
FourierSeriesSet fourier_set(BasicFunction kind, const WindingLayout& layout, int k_max);

/// Rotor loop turn function and its first and second running integrals from 0.
struct RotorTurnIntegrals {
  double n_r = 0.0;
  double k_r = 0.0;
  double m_r = 0.0;
};

RotorTurnIntegrals rotor_turn_integrals(const WindingLayout& layout, double phi);

/// A turn function in the stator frame with the angles in [0, 2pi) where its
/// slope changes. Integration panels should not straddle a breakpoint.
struct TurnFunction {
  std::function<double(double)> value;
  std::vector<double> breakpoints;
};

TurnFunction stator_phase_turns(const WindingLayout& layout, int phase);
/// Loop j of the rotor at mechanical angle theta.
TurnFunction rotor_loop_turns(const WindingLayout& layout, int loop, double theta);
/// Sum of `count` consecutive loops starting at `first` (cyclic).
TurnFunction merged_rotor_turns(const WindingLayout& layout, int first, int count, double theta);

/// <P n>/<P> for the given gap.
double winding_offset(const TurnFunction& turns, const GapState& gap);

/// Generalized winding function n(phi) - <P n>/<P>.
double generalized_winding_function(const TurnFunction& turns, const GapState& gap, double phi);

/// Legacy winding function n(phi) - <n>, which ignores the gap shape.
double legacy_winding_function(const TurnFunction& turns, double phi);

}  // namespace cagesim
