#pragma once

#include <functional>

#include <Eigen/Dense>

#include "cagesim/geometry.hpp"
#include "cagesim/motor.hpp"
#include "cagesim/winding.hpp"

namespace cagesim {

/// A scalar and its derivative with respect to the rotor angle.
struct Sensitive {
  double value = 0.0;
  double dtheta = 0.0;
};

/// Permeance-weighted means <P f>/P0 of the phase and loop functions.
///
/// Rotor loop functions live in the rotor frame; `theta` is the rotor angle
/// used to express them against the stator-frame permeance. All evaluators
/// propagate the GapState theta-derivatives.
namespace weighted {

Sensitive stator_turns(const GapState& gap, const WindingLayout& layout, int i);
Sensitive stator_squared(const GapState& gap, const WindingLayout& layout, int i);
Sensitive stator_product(const GapState& gap, const WindingLayout& layout, int i, int j);
Sensitive rotor_turns(const GapState& gap, const WindingLayout& layout, int i, double theta);
Sensitive rotor_squared(const GapState& gap, const WindingLayout& layout, int i, double theta);
/// Overlap of loop i with loop i-1 (cyclic).
Sensitive rotor_adjacent(const GapState& gap, const WindingLayout& layout, int i, double theta);
/// <P AS_i AR_j> by exact piecewise integration of the three-term permeance.
Sensitive stator_rotor(const GapState& gap, const WindingLayout& layout, int i, int j, double theta);

}  // namespace weighted

/// Stator-rotor mutual of a concentric machine, phase 1 against loop 1,
/// divided by l0. pi-periodic in theta.
Sensitive healthy_mutual_profile(const WindingLayout& layout, double theta);

enum class MutualMethod {
  Exact,           ///< exact <P AS AR> integral
  LocalPermeance,  ///< healthy profile scaled by the permeance at the loop centre
};

struct InductanceOptions {
  bool skew = true;               ///< three-point skew average on Lsr and dLsr
  bool skew_self_blocks = false;  ///< also average Ls and Lr
  bool leakage = true;
  MutualMethod mutual = MutualMethod::Exact;
};

struct InductanceBundle {
  Eigen::Matrix3d Ls;
  Eigen::MatrixXd Lr;
  Eigen::MatrixXd Lsr;  ///< rows: phases, columns: loops; Lrs is its transpose
  Eigen::Matrix3d dLs;
  Eigen::MatrixXd dLr;
  Eigen::MatrixXd dLsr;
  double theta = 0.0;
};

/// One stator-rotor mutual (H) with its derivative, no skew.
Sensitive mutual_stator_rotor(const MotorParameters& params, const EccentricityConfig& cfg,
                              double theta, int i, int j,
                              MutualMethod method = MutualMethod::Exact);

InductanceBundle inductance_bundle(const MotorParameters& params, const EccentricityConfig& cfg,
                                   double theta, const InductanceOptions& options = {});

/// Leakage contribution added to the magnetizing blocks.
struct LeakageMatrices {
  Eigen::Matrix3d Ls;
  Eigen::MatrixXd Lr;
};
LeakageMatrices leakage_matrices(const MotorParameters& params);

/// Three-point trapezoid average [L(t - g/2) + 2 L(t) + L(t + g/2)] / 4.
double skew_correct(const std::function<double(double)>& profile, double gamma_skew, double theta);

/// Inductance 2 pi l0 [<P x y> - <P x><P y>/<P>] by composite Gauss-Legendre
/// quadrature of the turn functions. Independent of the closed forms.
double quadrature_oracle(const TurnFunction& x, const TurnFunction& y, const GapState& gap,
                         double l0, int min_panels = 20000);

/// Same with the legacy winding function n_x - <n_x> in place of the
/// generalized one: l0 * integral P N_x n_y.
double legacy_quadrature(const TurnFunction& x, const TurnFunction& y, const GapState& gap,
                         double l0, int min_panels = 20000);

/// Magnetizing Ls, Lr, Lsr from the quadrature route, sharing one node set.
struct OracleMatrices {
  Eigen::Matrix3d Ls;
  Eigen::MatrixXd Lr;
  Eigen::MatrixXd Lsr;
};
OracleMatrices oracle_matrices(const MotorParameters& params, const EccentricityConfig& cfg,
                               double theta, int min_panels = 20000);

}  // namespace cagesim
