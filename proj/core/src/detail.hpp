#pragma once

// Internal building blocks shared by the exact and tabulated evaluators.

#include <array>
#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "cagesim/geometry.hpp"
#include "cagesim/inductance.hpp"
#include "cagesim/winding.hpp"

namespace cagesim::detail {

using cplx = std::complex<double>;

/// Gap-independent moments of one stator phase against one loop window,
///   z_k(x) = integral_0^{span+gamma} AS(x + t) AR(t) e^{i k t} dt,  k = 0, 1, 2,
/// with AR the trapezoid of the given span and x the loop start minus the
/// phase offset. `d` holds the x-derivatives. pi-periodic in x.
struct WindowMoments {
  double z0 = 0.0;
  cplx z1, z2;
  double d0 = 0.0;
  cplx d1, d2;
};

WindowMoments window_moments(double turns, double gamma, double span, double x);

/// <P AS AR> for a loop window starting at stator angle e, from its moments.
Sensitive combine_window(const GapState& gap, const WindowMoments& m, double e);

struct MagnetizingBlocks {
  Eigen::Matrix3d Ls, dLs;
  Eigen::MatrixXd Lr, dLr;
};

/// <P AR_j>/P0 for every loop j, and their theta-derivatives.
void loop_means(const WindingLayout& layout, const GapState& gap, double theta,
                Eigen::VectorXd& value, Eigen::VectorXd& dtheta);
/// <P AS_i>/P0 for the three phases.
void phase_means(const WindingLayout& layout, const GapState& gap, Eigen::Vector3d& value,
                 Eigen::Vector3d& dtheta);

/// Ls and Lr (magnetizing only) with theta-derivatives at one rotor angle.
void self_blocks(const WindingLayout& layout, const GapState& gap, double theta, double l0,
                 MagnetizingBlocks& out);

/// Cubic Hermite table of window_moments over one period of x. Shared and
/// immutable once built; lookups are thread-safe.
class MomentTable {
 public:
  static std::shared_ptr<const MomentTable> get(double turns, double gamma, double span);
  WindowMoments operator()(double x) const;

  static constexpr int kNodes = 1 << 14;

 private:
  MomentTable(double turns, double gamma, double span);
  // Per node: z0, Re z1, Im z1, Re z2, Im z2, then the same for d.
  std::vector<std::array<double, 10>> nodes_;
};

}  // namespace cagesim::detail
