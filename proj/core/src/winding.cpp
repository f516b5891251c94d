#include "cagesim/winding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cagesim/error.hpp"
#include "cagesim/quadrature.hpp"

namespace cagesim {
namespace {

double wrap(double phi, double period) {
  double r = std::fmod(phi, period);
  if (r < 0.0) r += period;
  return r;
}

double stator_turns(double N, double phi) {
  phi = wrap(phi, kPi);
  if (phi < kPi / 6.0) return 12.0 * N * phi / kPi;
  if (phi < kPi / 2.0) return 2.0 * N;
  if (phi < 2.0 * kPi / 3.0) return 8.0 * N - 12.0 * N * phi / kPi;
  return 0.0;
}

double rotor_turns(double pitch, double gamma, double phi) {
  phi = wrap(phi, kTwoPi);
  if (phi < gamma) return phi / gamma;
  if (phi < pitch) return 1.0;
  if (phi < pitch + gamma) return 1.0 - (phi - pitch) / gamma;
  return 0.0;
}

void check_phase(int i) {
  if (i < 1 || i > 3) throw IndexError("stator phase index " + std::to_string(i) + " not in 1..3");
}

void check_loop(const WindingLayout& layout, int i) {
  if (i < 1 || i > layout.bars) {
    throw IndexError("rotor loop index " + std::to_string(i) + " not in 1.." +
                     std::to_string(layout.bars));
  }
}

}  // namespace

const char* to_string(BasicFunction kind) {
  switch (kind) {
    case BasicFunction::AS: return "AS";
    case BasicFunction::BS: return "BS";
    case BasicFunction::CS: return "CS";
    case BasicFunction::AR: return "AR";
    case BasicFunction::BR: return "BR";
    case BasicFunction::CR: return "CR";
  }
  return "?";
}

void WindingLayout::validate() const {
  if (turns < 1) throw ConfigError("must be >= 1", "turns");
  if (pole_pairs != 2) throw ConfigError("only 2 pole pairs are supported", "pole_pairs");
  if (bars < 3) throw ConfigError("must be >= 3", "bars");
  if (!(gamma_bar > 0.0) || !(gamma_bar < kTwoPi / bars)) {
    throw ConfigError("must lie in (0, 2pi/n)", "gamma_bar");
  }
  if (!std::isfinite(gamma_skew) || gamma_skew < 0.0) throw ConfigError("must be >= 0", "gamma_skew");
}

double basic_function_value(BasicFunction kind, const WindingLayout& layout, double phi) {
  const double N = layout.turns;
  const double pitch = layout.bar_pitch();
  const double g = layout.gamma_bar;
  switch (kind) {
    case BasicFunction::AS: return stator_turns(N, phi);
    case BasicFunction::BS: {
      const double a = stator_turns(N, phi);
      return a * a;
    }
    case BasicFunction::CS: return stator_turns(N, phi) * stator_turns(N, phi - 2.0 * kPi / 3.0);
    case BasicFunction::AR: return rotor_turns(pitch, g, phi);
    case BasicFunction::BR: {
      const double a = rotor_turns(pitch, g, phi);
      return a * a;
    }
    case BasicFunction::CR: {
      // Overlap of a loop with its predecessor: nonzero only on the rising edge.
      const double x = wrap(phi, kTwoPi);
      return x < g ? x / g - (x * x) / (g * g) : 0.0;
    }
  }
  return 0.0;
}

double shifted(BasicFunction kind, const WindingLayout& layout, int i, double phi) {
  switch (kind) {
    case BasicFunction::AS:
    case BasicFunction::BS:
      check_phase(i);
      return basic_function_value(kind, layout, phi - kTwoPi * (i - 1) / 3.0);
    case BasicFunction::CS:
      throw IndexError("CS needs two phase indices");
    case BasicFunction::AR:
    case BasicFunction::BR:
    case BasicFunction::CR:
      check_loop(layout, i);
      return basic_function_value(kind, layout, phi - layout.bar_pitch() * (i - 1));
  }
  return 0.0;
}

double shifted(BasicFunction kind, const WindingLayout& layout, int i, int j, double phi) {
  if (kind != BasicFunction::CS) return shifted(kind, layout, i, phi);
  check_phase(i);
  check_phase(j);
  if (i == j) throw IndexError("CS needs two distinct phases");
  return basic_function_value(kind, layout, phi - (i + j) * kPi / 3.0 + kPi);
}

double FourierSeriesSet::operator()(double phi) const {
  double s = a0;
  for (const Harmonic& h : harmonics) {
    const double x = angular_multiplier * h.k * phi;
    s += h.a * std::cos(x) + h.b * std::sin(x);
  }
  return s;
}

FourierSeriesSet fourier_set(BasicFunction kind, const WindingLayout& layout, int k_max) {
  if (k_max < 2) throw ConfigError("must be >= 2", "k_max");
  const double N = layout.turns;
  const double n = layout.bars;
  const double g = layout.gamma_bar;

  FourierSeriesSet set;
  set.angular_multiplier = is_stator(kind) ? 2 : 1;
  switch (kind) {
    case BasicFunction::AS: set.a0 = N; break;
    case BasicFunction::BS: set.a0 = 16.0 * N * N / 9.0; break;
    case BasicFunction::CS: set.a0 = 2.0 * N * N / 3.0; break;
    case BasicFunction::AR: set.a0 = 1.0 / n; break;
    case BasicFunction::BR: set.a0 = 1.0 / n - g / (6.0 * kPi); break;
    case BasicFunction::CR: set.a0 = g / (12.0 * kPi); break;
  }

  set.harmonics.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    const double kd = k;
    const double c1 = std::cos(kd * kPi / 3.0);
    const double s1 = std::sin(kd * kPi / 3.0);
    const double odd = (k % 2 == 1) ? 2.0 : 0.0;  // 1 - (-1)^k
    const double even = 2.0 - odd;                 // 1 + (-1)^k
    const double pk2 = (kPi * kd) * (kPi * kd);
    Harmonic h{k, 0.0, 0.0};
    switch (kind) {
      case BasicFunction::AS:
        h.a = -6.0 * N / pk2 * odd * (1.0 - c1);
        h.b = 6.0 * N / pk2 * odd * s1;
        break;
      case BasicFunction::BS: {
        const double pk3 = pk2 * kPi * kd;
        h.a = 24.0 * N * N / pk2 * (c1 + std::cos(kd * kPi)) - 72.0 * N * N / pk3 * even * s1;
        h.b = 24.0 * N * N / pk2 * s1 - 72.0 * N * N / pk3 * even * (1.0 - c1);
        break;
      }
      case BasicFunction::CS:
        h.a = -12.0 * N * N / pk2 * (1.0 - 2.0 * c1 + std::cos(2.0 * kd * kPi / 3.0));
        h.b = -12.0 * N * N / pk2 * (-2.0 * s1 + std::sin(2.0 * kd * kPi / 3.0));
        break;
      case BasicFunction::AR: {
        const double amp = 4.0 / (kPi * kd * kd * g) * std::sin(kd * g / 2.0) * std::sin(kd * kPi / n);
        const double ph = kd * kPi / n + kd * g / 2.0;
        h.a = amp * std::cos(ph);
        h.b = amp * std::sin(ph);
        break;
      }
      case BasicFunction::BR: {
        const double amp = 4.0 / (kPi * kd * kd * g) *
                           (std::cos(kd * kPi / n - kd * g / 2.0) -
                            2.0 / (kd * g) * std::cos(kd * kPi / n) * std::sin(kd * g / 2.0));
        const double ph = kd * kPi / n + kd * g / 2.0;
        h.a = amp * std::cos(ph);
        h.b = amp * std::sin(ph);
        break;
      }
      case BasicFunction::CR: {
        const double amp = 2.0 / (kPi * g * kd * kd) *
                           (2.0 / (kd * g) * std::sin(kd * g / 2.0) - std::cos(kd * g / 2.0));
        h.a = amp * std::cos(kd * g / 2.0);
        h.b = amp * std::sin(kd * g / 2.0);
        break;
      }
    }
    set.harmonics.push_back(h);
  }
  return set;
}

RotorTurnIntegrals rotor_turn_integrals(const WindingLayout& layout, double phi) {
  const double g = layout.gamma_bar;
  const double w = layout.bar_pitch();
  RotorTurnIntegrals r;
  if (phi <= 0.0) return r;
  if (phi < g) {
    r.n_r = phi / g;
    r.k_r = phi * phi / (2.0 * g);
    r.m_r = phi * phi * phi / (6.0 * g);
    return r;
  }
  const double m_g = g * g / 6.0;
  if (phi < w) {
    const double u = phi - g;
    r.n_r = 1.0;
    r.k_r = g / 2.0 + u;
    r.m_r = m_g + g / 2.0 * u + u * u / 2.0;
    return r;
  }
  const double u_w = w - g;
  const double m_w = m_g + g / 2.0 * u_w + u_w * u_w / 2.0;
  const double k_w = w - g / 2.0;
  if (phi < w + g) {
    const double u = phi - w;
    r.n_r = 1.0 - u / g;
    r.k_r = k_w + u - u * u / (2.0 * g);
    r.m_r = m_w + k_w * u + u * u / 2.0 - u * u * u / (6.0 * g);
    return r;
  }
  const double m_end = m_w + k_w * g + g * g / 2.0 - g * g / 6.0;
  r.n_r = 0.0;
  r.k_r = w;
  r.m_r = m_end + w * (phi - w - g);
  return r;
}

TurnFunction stator_phase_turns(const WindingLayout& layout, int phase) {
  check_phase(phase);
  const double N = layout.turns;
  const double shift = kTwoPi * (phase - 1) / 3.0;
  TurnFunction t;
  t.value = [N, shift](double phi) { return stator_turns(N, phi - shift); };
  for (int m = 0; m < 12; ++m) t.breakpoints.push_back(wrap(shift + m * kPi / 6.0, kTwoPi));
  return t;
}

TurnFunction rotor_loop_turns(const WindingLayout& layout, int loop, double theta) {
  return merged_rotor_turns(layout, loop, 1, theta);
}

TurnFunction merged_rotor_turns(const WindingLayout& layout, int first, int count, double theta) {
  check_loop(layout, first);
  if (count < 1 || count >= layout.bars) throw IndexError("merged loop count out of range");
  const double pitch = layout.bar_pitch();
  const double g = layout.gamma_bar;
  const double start = theta + pitch * (first - 1);
  const double span = pitch * count;
  TurnFunction t;
  t.value = [start, span, g](double phi) { return rotor_turns(span, g, phi - start); };
  for (double b : {0.0, g, span, span + g}) t.breakpoints.push_back(wrap(start + b, kTwoPi));
  return t;
}

double winding_offset(const TurnFunction& turns, const GapState& gap) {
  const CircleRule rule = CircleRule::build(turns.breakpoints, 4096);
  const double weighted = rule.mean([&](double phi) { return gap.permeance(phi) * turns.value(phi); });
  return weighted / gap.A;
}

double generalized_winding_function(const TurnFunction& turns, const GapState& gap, double phi) {
  return turns.value(phi) - winding_offset(turns, gap);
}

double legacy_winding_function(const TurnFunction& turns, double phi) {
  return turns.value(phi) - winding_offset(turns, GapState::concentric());
}

}  // namespace cagesim
