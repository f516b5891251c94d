#include "cagesim/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <tuple>

#include "cagesim/error.hpp"
#include "detail.hpp"

namespace cagesim {

namespace detail {

MomentTable::MomentTable(double turns, double gamma, double span) : nodes_(kNodes + 1) {
  const double h = kPi / kNodes;
  for (int m = 0; m <= kNodes; ++m) {
    const WindowMoments w = window_moments(turns, gamma, span, m * h);
    nodes_[m] = {w.z0, w.z1.real(), w.z1.imag(), w.z2.real(), w.z2.imag(),
                 w.d0, w.d1.real(), w.d1.imag(), w.d2.real(), w.d2.imag()};
  }
}

std::shared_ptr<const MomentTable> MomentTable::get(double turns, double gamma, double span) {
  static std::mutex mutex;
  static std::map<std::tuple<double, double, double>, std::shared_ptr<const MomentTable>> cache;
  const auto key = std::make_tuple(turns, gamma, span);
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::shared_ptr<const MomentTable> table(new MomentTable(turns, gamma, span));
  cache.emplace(key, table);
  return table;
}

WindowMoments MomentTable::operator()(double x) const {
  constexpr double h = kPi / kNodes;
  double r = std::fmod(x, kPi);
  if (r < 0.0) r += kPi;
  int m = static_cast<int>(r / h);
  if (m >= kNodes) m = kNodes - 1;
  const double u = r / h - m;
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u, h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
  const double g00 = (6 * u2 - 6 * u) / h, g10 = 3 * u2 - 4 * u + 1, g01 = (-6 * u2 + 6 * u) / h,
               g11 = 3 * u2 - 2 * u;
  const auto& a = nodes_[m];
  const auto& b = nodes_[m + 1];
  std::array<double, 5> v{}, d{};
  for (int c = 0; c < 5; ++c) {
    v[c] = h00 * a[c] + h * h10 * a[c + 5] + h01 * b[c] + h * h11 * b[c + 5];
    d[c] = g00 * a[c] + g10 * a[c + 5] + g01 * b[c] + g11 * b[c + 5];
  }
  WindowMoments out;
  out.z0 = v[0];
  out.z1 = {v[1], v[2]};
  out.z2 = {v[3], v[4]};
  out.d0 = d[0];
  out.d1 = {d[1], d[2]};
  out.d2 = {d[3], d[4]};
  return out;
}

}  // namespace detail

LoopReduction LoopReduction::identity(int loops) {
  LoopReduction r;
  r.group.resize(static_cast<std::size_t>(loops));
  for (int i = 0; i < loops; ++i) r.group[i] = i;
  return r;
}

LoopReduction LoopReduction::merge_broken(int loops, const std::vector<int>& broken_bars) {
  if (broken_bars.empty()) return identity(loops);
  const int m = static_cast<int>(broken_bars.size());
  if (m > loops - 3) {
    throw UnsupportedConfigurationError("loop elimination keeps at least three loops; " +
                                        std::to_string(m) + " broken bars of " +
                                        std::to_string(loops) + " is too many");
  }
  std::set<int> bars;
  for (int b : broken_bars) {
    if (b < 1 || b > loops) throw IndexError("bar index " + std::to_string(b) + " not in 1.." + std::to_string(loops));
    if (!bars.insert(b).second) throw ConfigError("duplicate broken bar " + std::to_string(b), "broken_bars");
  }
  // The run starts at the broken bar whose cyclic predecessor is intact.
  int first = -1;
  for (int b : bars) {
    const int prev = b == 1 ? loops : b - 1;
    if (!bars.count(prev)) {
      if (first != -1) {
        throw UnsupportedConfigurationError("loop elimination needs a contiguous run of broken bars");
      }
      first = b;
    }
  }
  // Loops first .. first+m merge into loop `first`; the rest keep their order.
  std::vector<bool> absorbed(static_cast<std::size_t>(loops), false);
  for (int k = 1; k <= m; ++k) absorbed[(first - 1 + k) % loops] = true;
  LoopReduction r;
  r.group.assign(static_cast<std::size_t>(loops), -1);
  int next = 0;
  for (int i = 0; i < loops; ++i) {
    if (!absorbed[i]) r.group[i] = next++;
  }
  for (int k = 1; k <= m; ++k) r.group[(first - 1 + k) % loops] = r.group[first - 1];
  return r;
}

int LoopReduction::reduced() const {
  int top = -1;
  for (int g : group) top = std::max(top, g);
  return top + 1;
}

Eigen::MatrixXd LoopReduction::matrix() const {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(loops(), reduced());
  for (int i = 0; i < loops(); ++i) T(i, group[i]) = 1.0;
  return T;
}

InductanceModel::InductanceModel(const MotorParameters& params, const EccentricityConfig& gap,
                                 const InductanceOptions& options, LoopReduction reduction)
    : params_(params),
      layout_(params.layout()),
      gap_(gap),
      options_(options),
      reduction_(std::move(reduction)),
      leakage_(leakage_matrices(params)),
      l0_(params.l0()) {
  params_.validate();
  gap_.validate();
  if (reduction_.group.empty()) reduction_ = LoopReduction::identity(params.bars);
  if (reduction_.loops() != params.bars) {
    throw ConfigError("loop reduction covers " + std::to_string(reduction_.loops()) +
                      " loops, machine has " + std::to_string(params.bars));
  }
  if (options_.mutual == MutualMethod::Exact) {
    table_ = detail::MomentTable::get(layout_.turns, layout_.gamma_bar, layout_.bar_pitch());
  }
}

void InductanceModel::mutual(double theta, double weight, Eigen::MatrixXd& L, Eigen::MatrixXd& dL) const {
  const int n = layout_.bars;
  const double scale = weight * kTwoPi * l0_;
  if (options_.mutual == MutualMethod::LocalPermeance) {
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= n; ++j) {
        const Sensitive s = mutual_stator_rotor(params_, gap_, theta, i, j, options_.mutual);
        L(i - 1, j - 1) += weight * s.value;
        dL(i - 1, j - 1) += weight * s.dtheta;
      }
    }
    return;
  }
  const GapState g = gap_state(gap_, theta);
  Eigen::Vector3d as, das;
  Eigen::VectorXd ar, dar;
  detail::phase_means(layout_, g, as, das);
  detail::loop_means(layout_, g, theta, ar, dar);
  const double invA = 1.0 / g.A;
  const double pitch = layout_.bar_pitch();
  for (int i = 0; i < 3; ++i) {
    const double sigma = kTwoPi * i / 3.0;
    for (int j = 0; j < n; ++j) {
      const double e = theta + pitch * j;
      const Sensitive w = detail::combine_window(g, (*table_)(e - sigma), e);
      const double cross = as(i) * ar(j) * invA;
      const double dcross = (das(i) * ar(j) + as(i) * dar(j)) * invA - cross * g.dA * invA;
      L(i, j) += scale * (w.value - cross);
      dL(i, j) += scale * (w.dtheta - dcross);
    }
  }
}

void InductanceModel::evaluate(double theta, InductanceBundle& out) const {
  const int n = layout_.bars;
  const double h = 0.5 * layout_.gamma_skew;
  const bool skewed = options_.skew && h > 0.0;

  detail::MagnetizingBlocks self;
  detail::self_blocks(layout_, gap_state(gap_, theta), theta, l0_, self);
  if (skewed && options_.skew_self_blocks) {
    detail::MagnetizingBlocks lo, hi;
    detail::self_blocks(layout_, gap_state(gap_, theta - h), theta - h, l0_, lo);
    detail::self_blocks(layout_, gap_state(gap_, theta + h), theta + h, l0_, hi);
    self.Ls = 0.25 * (lo.Ls + 2.0 * self.Ls + hi.Ls);
    self.dLs = 0.25 * (lo.dLs + 2.0 * self.dLs + hi.dLs);
    self.Lr = 0.25 * (lo.Lr + 2.0 * self.Lr + hi.Lr);
    self.dLr = 0.25 * (lo.dLr + 2.0 * self.dLr + hi.dLr);
  }

  Eigen::MatrixXd Lsr = Eigen::MatrixXd::Zero(3, n);
  Eigen::MatrixXd dLsr = Eigen::MatrixXd::Zero(3, n);
  if (skewed) {
    mutual(theta - h, 0.25, Lsr, dLsr);
    mutual(theta, 0.5, Lsr, dLsr);
    mutual(theta + h, 0.25, Lsr, dLsr);
  } else {
    mutual(theta, 1.0, Lsr, dLsr);
  }

  out.theta = theta;
  out.Ls = self.Ls;
  out.dLs = self.dLs;
  if (options_.leakage) {
    out.Ls += leakage_.Ls;
    self.Lr += leakage_.Lr;
  }

  if (reduction_.trivial()) {
    out.Lr = std::move(self.Lr);
    out.dLr = std::move(self.dLr);
    out.Lsr = std::move(Lsr);
    out.dLsr = std::move(dLsr);
    return;
  }
  // Congruence with the incidence matrix, done as index sums.
  const int r = reduction_.reduced();
  const auto& g = reduction_.group;
  out.Lr = Eigen::MatrixXd::Zero(r, r);
  out.dLr = Eigen::MatrixXd::Zero(r, r);
  out.Lsr = Eigen::MatrixXd::Zero(3, r);
  out.dLsr = Eigen::MatrixXd::Zero(3, r);
  for (int j = 0; j < n; ++j) {
    out.Lsr.col(g[j]) += Lsr.col(j);
    out.dLsr.col(g[j]) += dLsr.col(j);
    for (int i = 0; i < n; ++i) {
      out.Lr(g[i], g[j]) += self.Lr(i, j);
      out.dLr(g[i], g[j]) += self.dLr(i, j);
    }
  }
}

InductanceBundle InductanceModel::evaluate(double theta) const {
  InductanceBundle b;
  evaluate(theta, b);
  return b;
}

}  // namespace cagesim
