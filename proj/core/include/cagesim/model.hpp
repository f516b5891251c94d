#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "cagesim/geometry.hpp"
#include "cagesim/inductance.hpp"
#include "cagesim/motor.hpp"

namespace cagesim {

namespace detail {
class MomentTable;
}

/// Grouping of rotor loops into independent mesh currents. Loops that share
/// a group carry one current; the identity grouping keeps all n loops.
struct LoopReduction {
  std::vector<int> group;  ///< reduced index (0-based) of every loop

  static LoopReduction identity(int loops);
  /// Merges the loops on either side of the contiguous run of broken bars.
  /// Bar k separates loop k from loop k+1 (cyclic, 1-based). Throws
  /// UnsupportedConfigurationError for a run that is not contiguous or
  /// leaves fewer than three loops.
  static LoopReduction merge_broken(int loops, const std::vector<int>& broken_bars);

  int loops() const { return static_cast<int>(group.size()); }
  int reduced() const;
  bool trivial() const { return reduced() == loops(); }
  /// Incidence matrix T (loops x reduced): i_loops = T i_reduced.
  Eigen::MatrixXd matrix() const;
};

/// Fast inductance evaluator bound to one machine and gap. The stator-rotor
/// window integrals come from per-layout Hermite tables that agree with the
/// exact route to roughly 1e-10 of the block scale. Instances are cheap to
/// copy and safe to use from one thread each.
class InductanceModel {
 public:
  InductanceModel(const MotorParameters& params, const EccentricityConfig& gap,
                  const InductanceOptions& options = {}, LoopReduction reduction = {});

  /// Bundle at rotor angle theta, sized to the reduced loop count.
  void evaluate(double theta, InductanceBundle& out) const;
  InductanceBundle evaluate(double theta) const;

  int rotor_loops() const { return reduction_.reduced(); }
  const LoopReduction& reduction() const { return reduction_; }
  const MotorParameters& params() const { return params_; }
  const EccentricityConfig& gap() const { return gap_; }

 private:
  void mutual(double theta, double weight, Eigen::MatrixXd& L, Eigen::MatrixXd& dL) const;

  MotorParameters params_;
  WindingLayout layout_;
  EccentricityConfig gap_;
  InductanceOptions options_;
  LoopReduction reduction_;
  LeakageMatrices leakage_;
  double l0_ = 0.0;
  std::shared_ptr<const detail::MomentTable> table_;
};

}  // namespace cagesim
