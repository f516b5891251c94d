#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "cagesim/error.hpp"
#include "cagesim/inductance.hpp"
#include "detail.hpp"

namespace cagesim {
namespace {

using detail::cplx;

double wrap(double phi, double period) {
  double r = std::fmod(phi, period);
  if (r < 0.0) r += period;
  return r;
}

double stator_turns(double N, double x) {
  x = wrap(x, kPi);
  if (x < kPi / 6.0) return 12.0 * N * x / kPi;
  if (x < kPi / 2.0) return 2.0 * N;
  if (x < 2.0 * kPi / 3.0) return 8.0 * N - 12.0 * N * x / kPi;
  return 0.0;
}

// Moments J_m = integral_0^h u^m e^{i k u} du for m = 0, 1, 2, summed as a
// power series in (i k u). Pieces never exceed pi/6 and k <= 2, so the series
// converges in a few dozen terms with no cancellation.
std::array<cplx, 3> moments(int k, double h) {
  std::array<cplx, 3> J{};
  if (k == 0) {
    J[0] = h;
    J[1] = h * h / 2.0;
    J[2] = h * h * h / 3.0;
    return J;
  }
  const cplx z(0.0, k * h);
  for (int m = 0; m < 3; ++m) {
    const double hm1 = std::pow(h, m + 1);
    cplx term = 1.0;  // (ikh)^p / p!
    cplx sum = 0.0;
    for (int p = 0; p < 60; ++p) {
      const cplx add = term / double(m + p + 1);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      term *= z / double(p + 1);
    }
    J[m] = hm1 * sum;
  }
  return J;
}

}  // namespace

namespace detail {

WindowMoments window_moments(double turns, double gamma, double span, double x) {
  const double width = span + gamma;
  std::array<double, 16> cuts{};
  std::size_t count = 0;
  cuts[count++] = 0.0;
  cuts[count++] = gamma;
  cuts[count++] = span;
  cuts[count++] = width;
  const double x0 = wrap(x, kPi / 6.0);
  for (double t = kPi / 6.0 - x0; t < width && count < cuts.size(); t += kPi / 6.0) {
    if (t > 0.0) cuts[count++] = t;
  }
  std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(count));

  auto loop_value = [&](double t) {
    if (t <= gamma) return t / gamma;
    if (t <= span) return 1.0;
    return (width - t) / gamma;
  };

  WindowMoments out;
  for (std::size_t c = 0; c + 1 < count; ++c) {
    const double ta = cuts[c];
    const double h = cuts[c + 1] - ta;
    if (h <= 1e-15) continue;
    const double mid = ta + 0.5 * h;
    const double s_a = stator_turns(turns, x + ta);
    // Slope from the midpoint so a wrap at pi cannot corrupt it.
    const double s_m = stator_turns(turns, x + mid);
    const double s1 = 2.0 * (s_m - s_a) / h;
    const double r_a = loop_value(ta);
    const double r1 = (loop_value(mid) - r_a) / (0.5 * h);

    // q(u) = AS * AR and dq(u) = AS' * AR on u in [0, h]
    const std::array<double, 3> q{s_a * r_a, s_a * r1 + s1 * r_a, s1 * r1};
    const std::array<double, 3> dq{s1 * r_a, s1 * r1, 0.0};

    const std::array<cplx, 3> J0 = moments(0, h);
    for (int m = 0; m < 3; ++m) {
      out.z0 += q[m] * J0[m].real();
      out.d0 += dq[m] * J0[m].real();
    }
    for (int k = 1; k <= 2; ++k) {
      const std::array<cplx, 3> J = moments(k, h);
      const cplx shift = std::polar(1.0, k * ta);
      cplx zq = 0.0, zdq = 0.0;
      for (int m = 0; m < 3; ++m) {
        zq += q[m] * J[m];
        zdq += dq[m] * J[m];
      }
      (k == 1 ? out.z1 : out.z2) += shift * zq;
      (k == 1 ? out.d1 : out.d2) += shift * zdq;
    }
  }
  return out;
}

Sensitive combine_window(const GapState& gap, const WindowMoments& m, double e) {
  const cplx r1 = std::polar(1.0, e - gap.alpha);
  const cplx r2 = r1 * r1;
  const cplx z1 = r1 * m.z1, z2 = r2 * m.z2;
  const cplx d1 = r1 * m.d1, d2 = r2 * m.d2;
  const double inv = 1.0 / kTwoPi;
  Sensitive out;
  out.value = inv * (gap.A * m.z0 + gap.B * z1.real() + gap.C * z2.real());
  out.dtheta = inv * (gap.dA * m.z0 + gap.dB * z1.real() + gap.dC * z2.real() +
                      (gap.dAlpha - 1.0) * (gap.B * z1.imag() + 2.0 * gap.C * z2.imag()) +
                      gap.A * m.d0 + gap.B * d1.real() + gap.C * d2.real());
  return out;
}

}  // namespace detail

namespace weighted {

Sensitive stator_rotor(const GapState& gap, const WindingLayout& layout, int i, int j, double theta) {
  if (i < 1 || i > 3) throw IndexError("stator phase index " + std::to_string(i) + " not in 1..3");
  if (j < 1 || j > layout.bars) {
    throw IndexError("rotor loop index " + std::to_string(j) + " not in 1.." +
                     std::to_string(layout.bars));
  }
  const double e = theta + layout.bar_pitch() * (j - 1);
  const double sigma = kTwoPi * (i - 1) / 3.0;
  const detail::WindowMoments m =
      detail::window_moments(layout.turns, layout.gamma_bar, layout.bar_pitch(), e - sigma);
  return detail::combine_window(gap, m, e);
}

}  // namespace weighted

Sensitive healthy_mutual_profile(const WindingLayout& layout, double theta) {
  const double N = layout.turns;
  const double t = wrap(theta, kPi);
  // Integration by parts of AS(phi) AR(phi - t) over two stator periods.
  static constexpr std::array<std::pair<double, double>, 4> kRamps{{
      {0.0, 1.0 / 6.0}, {1.0 / 2.0, 2.0 / 3.0}, {1.0, 7.0 / 6.0}, {3.0 / 2.0, 5.0 / 3.0}}};
  double x = 0.0, dx = 0.0;
  for (std::size_t r = 0; r < kRamps.size(); ++r) {
    const double sign = (r % 2 == 0) ? -1.0 : 1.0;
    const RotorTurnIntegrals hi = rotor_turn_integrals(layout, kRamps[r].second * kPi - t);
    const RotorTurnIntegrals lo = rotor_turn_integrals(layout, kRamps[r].first * kPi - t);
    x += sign * (hi.m_r - lo.m_r);
    dx -= sign * (hi.k_r - lo.k_r);
  }
  const double scale = 12.0 * N / kPi;
  return {scale * x - kTwoPi * N / layout.bars, scale * dx};
}

Sensitive mutual_stator_rotor(const MotorParameters& params, const EccentricityConfig& cfg,
                              double theta, int i, int j, MutualMethod method) {
  const WindingLayout layout = params.layout();
  const GapState gap = gap_state(cfg, theta);
  const double l0 = params.l0();
  const Sensitive as = weighted::stator_turns(gap, layout, i);
  const Sensitive ar = weighted::rotor_turns(gap, layout, j, theta);

  // <P AS><P AR>/<P>
  const double cross = as.value * ar.value / gap.A;
  const double dcross = (as.dtheta * ar.value + as.value * ar.dtheta) / gap.A - cross * gap.dA / gap.A;

  if (method == MutualMethod::Exact) {
    const Sensitive w = weighted::stator_rotor(gap, layout, i, j, theta);
    return {kTwoPi * l0 * (w.value - cross), kTwoPi * l0 * (w.dtheta - dcross)};
  }

  // Healthy profile scaled by the permeance at the loop centre.
  const double n = layout.bars;
  const double mapped = theta - kTwoPi * (i - 1) / 3.0 + kTwoPi * (j - 1) / n;
  const Sensitive healthy = healthy_mutual_profile(layout, mapped);
  const double integral = healthy.value + kTwoPi * layout.turns / n;  // raw integral of AS AR
  const double centre = theta + (2 * j - 1) * kPi / n + layout.gamma_bar / 2.0;
  const double p = gap.permeance(centre);
  const double psi = centre - gap.alpha;
  const double dp = gap.permeance_dtheta(centre) - gap.B * std::sin(psi) - 2.0 * gap.C * std::sin(2.0 * psi);
  return {l0 * (p * integral - kTwoPi * cross),
          l0 * (dp * integral + p * healthy.dtheta - kTwoPi * dcross)};
}

}  // namespace cagesim
