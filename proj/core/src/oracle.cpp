#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "cagesim/inductance.hpp"
#include "cagesim/quadrature.hpp"

namespace cagesim {

CircleRule CircleRule::build(std::vector<double> breakpoints, int min_panels) {
  using Rule = boost::math::quadrature::gauss<double, 8>;
  for (double& b : breakpoints) {
    b = std::fmod(b, kTwoPi);
    if (b < 0.0) b += kTwoPi;
  }
  breakpoints.push_back(0.0);
  breakpoints.push_back(kTwoPi);
  std::sort(breakpoints.begin(), breakpoints.end());

  const double target = kTwoPi / std::max(min_panels, 1);
  CircleRule rule;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  for (std::size_t s = 0; s + 1 < breakpoints.size(); ++s) {
    const double a = breakpoints[s];
    const double b = breakpoints[s + 1];
    if (b - a <= 0.0) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / target)));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = a + (p + 0.5) * h;
      for (std::size_t q = 0; q < x.size(); ++q) {
        const double wq = 0.5 * h * w[q] / kTwoPi;
        rule.nodes.push_back(c - 0.5 * h * x[q]);
        rule.weights.push_back(wq);
        if (x[q] != 0.0) {
          rule.nodes.push_back(c + 0.5 * h * x[q]);
          rule.weights.push_back(wq);
        }
      }
    }
  }
  return rule;
}

double CircleRule::mean(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
  return s;
}

namespace {

struct Means {
  double p, px, py, pxy, x;
};

Means tabulate(const TurnFunction& x, const TurnFunction& y, const GapState& gap, int min_panels) {
  std::vector<double> bp = x.breakpoints;
  bp.insert(bp.end(), y.breakpoints.begin(), y.breakpoints.end());
  const CircleRule rule = CircleRule::build(std::move(bp), min_panels);
  Means m{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double phi = rule.nodes[i];
    const double w = rule.weights[i];
    const double p = gap.permeance(phi);
    const double xv = x.value(phi);
    const double yv = y.value(phi);
    m.p += w * p;
    m.px += w * p * xv;
    m.py += w * p * yv;
    m.pxy += w * p * xv * yv;
    m.x += w * xv;
  }
  return m;
}

}  // namespace

double quadrature_oracle(const TurnFunction& x, const TurnFunction& y, const GapState& gap,
                         double l0, int min_panels) {
  const Means m = tabulate(x, y, gap, min_panels);
  return kTwoPi * l0 * (m.pxy - m.px * m.py / m.p);
}

double legacy_quadrature(const TurnFunction& x, const TurnFunction& y, const GapState& gap,
                         double l0, int min_panels) {
  const Means m = tabulate(x, y, gap, min_panels);
  return kTwoPi * l0 * (m.pxy - m.x * m.py);
}

OracleMatrices oracle_matrices(const MotorParameters& params, const EccentricityConfig& cfg,
                               double theta, int min_panels) {
  const WindingLayout layout = params.layout();
  const GapState gap = gap_state(cfg, theta);
  const int n = layout.bars;

  std::vector<TurnFunction> fns;
  for (int i = 1; i <= 3; ++i) fns.push_back(stator_phase_turns(layout, i));
  for (int j = 1; j <= n; ++j) fns.push_back(rotor_loop_turns(layout, j, theta));

  std::vector<double> bp;
  for (const TurnFunction& f : fns) bp.insert(bp.end(), f.breakpoints.begin(), f.breakpoints.end());
  const CircleRule rule = CircleRule::build(std::move(bp), min_panels);
  const auto nodes = static_cast<Eigen::Index>(rule.nodes.size());
  const auto count = static_cast<Eigen::Index>(fns.size());

  Eigen::MatrixXd F(nodes, count);
  Eigen::VectorXd wp(nodes);
  for (Eigen::Index q = 0; q < nodes; ++q) {
    const double phi = rule.nodes[static_cast<std::size_t>(q)];
    wp(q) = rule.weights[static_cast<std::size_t>(q)] * gap.permeance(phi);
    for (Eigen::Index c = 0; c < count; ++c) F(q, c) = fns[static_cast<std::size_t>(c)].value(phi);
  }
  const double mean_p = wp.sum();
  const Eigen::VectorXd mean_pf = F.transpose() * wp;
  Eigen::MatrixXd gram = F.transpose() * (wp.asDiagonal() * F);
  gram -= mean_pf * mean_pf.transpose() / mean_p;
  gram *= kTwoPi * params.l0();

  OracleMatrices out;
  out.Ls = gram.topLeftCorner(3, 3);
  out.Lr = gram.bottomRightCorner(n, n);
  out.Lsr = gram.topRightCorner(3, n);
  return out;
}

}  // namespace cagesim
