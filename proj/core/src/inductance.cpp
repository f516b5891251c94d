#include "cagesim/inductance.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cagesim/error.hpp"
#include "detail.hpp"

namespace cagesim {
namespace {

// K * X * cos(k * arg) and its theta-derivative.
Sensitive harmonic(double K, double X, double dX, int k, double arg, double darg) {
  const double c = std::cos(k * arg);
  const double s = std::sin(k * arg);
  return {K * X * c, K * (dX * c - X * k * s * darg)};
}

Sensitive operator+(Sensitive a, Sensitive b) { return {a.value + b.value, a.dtheta + b.dtheta}; }

void check_phase(int i) {
  if (i < 1 || i > 3) throw IndexError("stator phase index " + std::to_string(i) + " not in 1..3");
}

void check_loop(const WindingLayout& layout, int i) {
  if (i < 1 || i > layout.bars) {
    throw IndexError("rotor loop index " + std::to_string(i) + " not in 1.." +
                     std::to_string(layout.bars));
  }
}

// Coefficients of the rotor-side averages. Only depend on the layout.
struct RotorCoefficients {
  double turns_b, turns_c;
  double squared_a0, squared_b, squared_c;
  double adjacent_a0, adjacent_b, adjacent_c;
};

RotorCoefficients rotor_coefficients(const WindingLayout& layout) {
  const double n = layout.bars;
  const double g = layout.gamma_bar;
  const double pn = kPi / n;
  RotorCoefficients r{};
  r.turns_b = 2.0 / (kPi * g) * std::sin(g / 2.0) * std::sin(pn);
  r.turns_c = 1.0 / (2.0 * kPi * g) * std::sin(g) * std::sin(2.0 * pn);
  r.squared_a0 = 1.0 / n - g / (6.0 * kPi);
  r.squared_b = 2.0 / (kPi * g) * (std::cos(pn - g / 2.0) - 2.0 / g * std::cos(pn) * std::sin(g / 2.0));
  r.squared_c = 1.0 / (2.0 * kPi * g) * (std::cos(2.0 * pn - g) - 1.0 / g * std::cos(2.0 * pn) * std::sin(g));
  r.adjacent_a0 = g / (12.0 * kPi);
  r.adjacent_b = 1.0 / (kPi * g) * (2.0 / g * std::sin(g / 2.0) - std::cos(g / 2.0));
  r.adjacent_c = 1.0 / (4.0 * kPi * g) * (std::sin(g) / g - std::cos(g));
  return r;
}

Sensitive rotor_average(const GapState& gap, double a0, double kb, double kc, double arg) {
  const double darg = gap.dAlpha - 1.0;
  return Sensitive{a0 * gap.A, a0 * gap.dA} + harmonic(kb, gap.B, gap.dB, 1, arg, darg) +
         harmonic(kc, gap.C, gap.dC, 2, arg, darg);
}

// x*y/A and its derivative.
Sensitive cross_over_mean(const Sensitive& x, const Sensitive& y, const GapState& gap) {
  const double v = x.value * y.value / gap.A;
  const double d = (x.dtheta * y.value + x.value * y.dtheta) / gap.A - v * gap.dA / gap.A;
  return {v, d};
}

}  // namespace

namespace detail {

void loop_means(const WindingLayout& layout, const GapState& gap, double theta,
                Eigen::VectorXd& value, Eigen::VectorXd& dtheta) {
  const int n = layout.bars;
  const RotorCoefficients rc = rotor_coefficients(layout);
  value.resize(n);
  dtheta.resize(n);
  for (int i = 0; i < n; ++i) {
    const double arg = gap.alpha - theta - layout.bar_pitch() * i - kPi / n - layout.gamma_bar / 2.0;
    const Sensitive t = rotor_average(gap, 1.0 / n, rc.turns_b, rc.turns_c, arg);
    value(i) = t.value;
    dtheta(i) = t.dtheta;
  }
}

void phase_means(const WindingLayout& layout, const GapState& gap, Eigen::Vector3d& value,
                 Eigen::Vector3d& dtheta) {
  const double N = layout.turns;
  for (int i = 1; i <= 3; ++i) {
    const double arg = gap.alpha - (2 * i - 1) * kPi / 3.0;
    const Sensitive s = Sensitive{N * gap.A, N * gap.dA} +
                        harmonic(6.0 * N / (kPi * kPi), gap.C, gap.dC, 2, arg, gap.dAlpha);
    value(i - 1) = s.value;
    dtheta(i - 1) = s.dtheta;
  }
}

void self_blocks(const WindingLayout& layout, const GapState& gap, double theta, double l0,
                 MagnetizingBlocks& m) {
  const int n = layout.bars;
  const double scale = kTwoPi * l0;
  const double N = layout.turns;
  const double N2 = N * N;
  const double c2 = 6.0 / (kPi * kPi);

  std::array<Sensitive, 3> as;
  for (int i = 1; i <= 3; ++i) {
    const double arg = gap.alpha - (2 * i - 1) * kPi / 3.0;
    as[i - 1] = Sensitive{N * gap.A, N * gap.dA} + harmonic(c2 * N, gap.C, gap.dC, 2, arg, gap.dAlpha);
  }
  for (int i = 1; i <= 3; ++i) {
    for (int j = i; j <= 3; ++j) {
      const double arg = gap.alpha - (i + j - 1) * kPi / 3.0;
      const Sensitive w =
          (i == j) ? Sensitive{16.0 * N2 / 9.0 * gap.A, 16.0 * N2 / 9.0 * gap.dA} +
                         harmonic(2.0 * c2 * N2, gap.C, gap.dC, 2, arg, gap.dAlpha)
                   : Sensitive{2.0 * N2 / 3.0 * gap.A, 2.0 * N2 / 3.0 * gap.dA} +
                         harmonic(-c2 * N2, gap.C, gap.dC, 2, arg, gap.dAlpha);
      const Sensitive c = cross_over_mean(as[i - 1], as[j - 1], gap);
      m.Ls(i - 1, j - 1) = m.Ls(j - 1, i - 1) = scale * (w.value - c.value);
      m.dLs(i - 1, j - 1) = m.dLs(j - 1, i - 1) = scale * (w.dtheta - c.dtheta);
    }
  }

  const RotorCoefficients rc = rotor_coefficients(layout);
  const double pitch = layout.bar_pitch();
  m.Lr.resize(n, n);
  m.dLr.resize(n, n);
  // Loop averages, then the rank-one <P AR_i><P AR_j>/A part.
  Eigen::VectorXd v(n), dv(n);
  loop_means(layout, gap, theta, v, dv);
  const double invA = 1.0 / gap.A;
  m.Lr.noalias() = (-scale * invA) * v * v.transpose();
  m.dLr.noalias() = (-scale * invA) * (dv * v.transpose() + v * dv.transpose());
  m.dLr.noalias() += (scale * invA * invA * gap.dA) * v * v.transpose();
  for (int i = 0; i < n; ++i) {
    const double arg = gap.alpha - theta - pitch * i - kPi / n - layout.gamma_bar / 2.0;
    const Sensitive self = rotor_average(gap, rc.squared_a0, rc.squared_b, rc.squared_c, arg);
    m.Lr(i, i) += scale * self.value;
    m.dLr(i, i) += scale * self.dtheta;
    const int prev = (i == 0) ? n - 1 : i - 1;
    const Sensitive adj =
        rotor_average(gap, rc.adjacent_a0, rc.adjacent_b, rc.adjacent_c, arg + kPi / n);
    m.Lr(i, prev) += scale * adj.value;
    m.dLr(i, prev) += scale * adj.dtheta;
    m.Lr(prev, i) = m.Lr(i, prev);
    m.dLr(prev, i) = m.dLr(i, prev);
  }
}

}  // namespace detail

namespace {

void mutual_block(const MotorParameters& params, const WindingLayout& layout,
                  const EccentricityConfig& cfg, double theta, MutualMethod method,
                  Eigen::MatrixXd& L, Eigen::MatrixXd& dL) {
  const int n = layout.bars;
  L.resize(3, n);
  dL.resize(3, n);
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= n; ++j) {
      const Sensitive s = mutual_stator_rotor(params, cfg, theta, i, j, method);
      L(i - 1, j - 1) = s.value;
      dL(i - 1, j - 1) = s.dtheta;
    }
  }
}

}  // namespace

void MotorParameters::validate() const {
  if (phases != 3) throw ConfigError("only 3-phase machines are supported", "phases");
  auto positive = [](double v, const char* field) {
    if (!std::isfinite(v) || !(v > 0.0)) throw ConfigError("must be > 0", field);
  };
  positive(stator_resistance, "stator_resistance");
  positive(bar_resistance, "bar_resistance");
  positive(end_ring_resistance, "end_ring_resistance");
  positive(stator_leakage, "stator_leakage");
  positive(bar_leakage, "bar_leakage");
  positive(end_ring_leakage, "end_ring_leakage");
  positive(rotor_radius, "rotor_radius");
  positive(stack_length, "stack_length");
  positive(air_gap, "air_gap");
  positive(inertia, "inertia");
  if (!std::isfinite(load_torque)) throw ConfigError("must be finite", "load_torque");
  layout().validate();
}

WindingLayout MotorParameters::layout() const {
  WindingLayout w;
  w.turns = turns;
  w.pole_pairs = pole_pairs;
  w.bars = bars;
  w.gamma_bar = gamma_bar;
  w.gamma_skew = gamma_skew;
  return w;
}

GapGeometry MotorParameters::geometry() const { return GapGeometry::from_rotor(rotor_radius, air_gap); }

double MotorParameters::l0() const { return geometry().P0 * stack_length; }

void Supply::validate() const {
  if (!std::isfinite(peak_voltage) || peak_voltage < 0.0) throw ConfigError("must be >= 0", "peak_voltage");
  if (!std::isfinite(frequency) || !(frequency > 0.0)) throw ConfigError("must be > 0", "frequency");
}

namespace weighted {

Sensitive stator_turns(const GapState& gap, const WindingLayout& layout, int i) {
  check_phase(i);
  const double N = layout.turns;
  const double arg = gap.alpha - (2 * i - 1) * kPi / 3.0;
  return Sensitive{N * gap.A, N * gap.dA} +
         harmonic(6.0 * N / (kPi * kPi), gap.C, gap.dC, 2, arg, gap.dAlpha);
}

Sensitive stator_squared(const GapState& gap, const WindingLayout& layout, int i) {
  check_phase(i);
  const double N2 = double(layout.turns) * layout.turns;
  const double arg = gap.alpha - (2 * i - 1) * kPi / 3.0;
  return Sensitive{16.0 * N2 / 9.0 * gap.A, 16.0 * N2 / 9.0 * gap.dA} +
         harmonic(12.0 * N2 / (kPi * kPi), gap.C, gap.dC, 2, arg, gap.dAlpha);
}

Sensitive stator_product(const GapState& gap, const WindingLayout& layout, int i, int j) {
  check_phase(i);
  check_phase(j);
  if (i == j) throw IndexError("stator product needs two distinct phases");
  const double N2 = double(layout.turns) * layout.turns;
  const double arg = gap.alpha - (i + j - 1) * kPi / 3.0;
  return Sensitive{2.0 * N2 / 3.0 * gap.A, 2.0 * N2 / 3.0 * gap.dA} +
         harmonic(-6.0 * N2 / (kPi * kPi), gap.C, gap.dC, 2, arg, gap.dAlpha);
}

Sensitive rotor_turns(const GapState& gap, const WindingLayout& layout, int i, double theta) {
  check_loop(layout, i);
  const RotorCoefficients rc = rotor_coefficients(layout);
  const double n = layout.bars;
  const double arg = gap.alpha - theta - kTwoPi * (i - 1) / n - kPi / n - layout.gamma_bar / 2.0;
  return rotor_average(gap, 1.0 / n, rc.turns_b, rc.turns_c, arg);
}

Sensitive rotor_squared(const GapState& gap, const WindingLayout& layout, int i, double theta) {
  check_loop(layout, i);
  const RotorCoefficients rc = rotor_coefficients(layout);
  const double n = layout.bars;
  const double arg = gap.alpha - theta - kTwoPi * (i - 1) / n - kPi / n - layout.gamma_bar / 2.0;
  return rotor_average(gap, rc.squared_a0, rc.squared_b, rc.squared_c, arg);
}

Sensitive rotor_adjacent(const GapState& gap, const WindingLayout& layout, int i, double theta) {
  check_loop(layout, i);
  const RotorCoefficients rc = rotor_coefficients(layout);
  const double n = layout.bars;
  const double arg = gap.alpha - theta - kTwoPi * (i - 1) / n - layout.gamma_bar / 2.0;
  return rotor_average(gap, rc.adjacent_a0, rc.adjacent_b, rc.adjacent_c, arg);
}

}  // namespace weighted

LeakageMatrices leakage_matrices(const MotorParameters& params) {
  const int n = params.bars;
  LeakageMatrices m;
  m.Ls = Eigen::Matrix3d::Identity() * params.stator_leakage;
  m.Lr = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int next = (i + 1) % n;
    m.Lr(i, i) += 2.0 * (params.bar_leakage + params.end_ring_leakage);
    m.Lr(i, next) -= params.bar_leakage;
    m.Lr(next, i) -= params.bar_leakage;
  }
  return m;
}

double skew_correct(const std::function<double(double)>& profile, double gamma_skew, double theta) {
  if (gamma_skew == 0.0) return profile(theta);
  const double h = 0.5 * gamma_skew;
  return 0.25 * (profile(theta - h) + 2.0 * profile(theta) + profile(theta + h));
}

InductanceBundle inductance_bundle(const MotorParameters& params, const EccentricityConfig& cfg,
                                   double theta, const InductanceOptions& options) {
  const WindingLayout layout = params.layout();
  const double l0 = params.l0();
  const double h = 0.5 * layout.gamma_skew;
  const bool skewed = options.skew && h > 0.0;

  InductanceBundle b;
  b.theta = theta;

  detail::MagnetizingBlocks centre;
  detail::self_blocks(layout, gap_state(cfg, theta), theta, l0, centre);
  if (skewed && options.skew_self_blocks) {
    detail::MagnetizingBlocks lo, hi;
    detail::self_blocks(layout, gap_state(cfg, theta - h), theta - h, l0, lo);
    detail::self_blocks(layout, gap_state(cfg, theta + h), theta + h, l0, hi);
    b.Ls = 0.25 * (lo.Ls + 2.0 * centre.Ls + hi.Ls);
    b.dLs = 0.25 * (lo.dLs + 2.0 * centre.dLs + hi.dLs);
    b.Lr = 0.25 * (lo.Lr + 2.0 * centre.Lr + hi.Lr);
    b.dLr = 0.25 * (lo.dLr + 2.0 * centre.dLr + hi.dLr);
  } else {
    b.Ls = centre.Ls;
    b.dLs = centre.dLs;
    b.Lr = std::move(centre.Lr);
    b.dLr = std::move(centre.dLr);
  }

  mutual_block(params, layout, cfg, theta, options.mutual, b.Lsr, b.dLsr);
  if (skewed) {
    Eigen::MatrixXd lo, dlo, hi, dhi;
    mutual_block(params, layout, cfg, theta - h, options.mutual, lo, dlo);
    mutual_block(params, layout, cfg, theta + h, options.mutual, hi, dhi);
    b.Lsr = 0.25 * (lo + 2.0 * b.Lsr + hi);
    b.dLsr = 0.25 * (dlo + 2.0 * b.dLsr + dhi);
  }

  if (options.leakage) {
    const LeakageMatrices leak = leakage_matrices(params);
    b.Ls += leak.Ls;
    b.Lr += leak.Lr;
  }
  return b;
}

}  // namespace cagesim
