#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cagesim/geometry.hpp"
#include "cagesim/inductance.hpp"
#include "cagesim/model.hpp"
#include "cagesim/motor.hpp"

namespace cagesim {

enum class BarModel {
  ResistanceScaling,  ///< broken bars keep their loops with a scaled resistance
  LoopElimination,    ///< loops either side of the broken run merge into one
};

struct FaultSpec {
  EccentricityConfig eccentricity;
  std::vector<int> broken_bars;  ///< 1-based; bar k separates loop k from loop k+1
  BarModel bar_model = BarModel::ResistanceScaling;
  double broken_factor = 1000.0;  ///< r_broken = factor * r_bar

  /// Throws ConfigError / IndexError / UnsupportedConfigurationError.
  void validate(int bars) const;
};

struct ResistanceMatrices {
  Eigen::Matrix3d Rs;
  Eigen::MatrixXd Rr;  ///< n x n, cyclic tridiagonal
};

/// Stator and rotor-loop resistances. Under ResistanceScaling each broken bar
/// carries factor * r_bar; under LoopElimination the healthy n x n matrix is
/// returned and the reduction is applied separately.
ResistanceMatrices resistance_matrices(const MotorParameters& params, const FaultSpec& fault);

struct ReducedMatrices {
  Eigen::MatrixXd Rr;   ///< (n - m) x (n - m)
  Eigen::MatrixXd Lr;   ///< (n - m) x (n - m), leakage included
  Eigen::MatrixXd Lsr;  ///< 3 x (n - m)
  LoopReduction reduction;
};

/// Rotor matrices after merging the loops around a contiguous run of broken
/// bars, evaluated at one rotor angle.
ReducedMatrices reduced_matrices_loop_elimination(const MotorParameters& params,
                                                  const std::vector<int>& broken_bars,
                                                  const EccentricityConfig& gap = {},
                                                  double theta = 0.0,
                                                  const InductanceOptions& options = {});

struct SimulationState {
  Eigen::Vector3d i_s = Eigen::Vector3d::Zero();
  Eigen::VectorXd i_r;
  double omega = 0.0;
  double theta = 0.0;
  double t = 0.0;

  static SimulationState zero(int rotor_loops);
};

struct StateDerivative {
  Eigen::Vector3d di_s = Eigen::Vector3d::Zero();
  Eigen::VectorXd di_r;
  double domega = 0.0;
  double dtheta = 0.0;
  double torque = 0.0;
  double neutral_voltage = 0.0;
};

struct ModelOptions {
  InductanceOptions inductance;
  /// Star point floating: stator currents are constrained to sum to zero.
  bool isolated_neutral = true;
};

/// Coupled electrical and mechanical equations of one machine. The flat state
/// is [i_s (3), i_r (loops), omega, theta]. Evaluation reuses internal
/// workspace, so use one instance per thread.
class MachineModel {
 public:
  MachineModel(const MotorParameters& params, const FaultSpec& fault, const Supply& supply,
               const ModelOptions& options = {});

  int rotor_loops() const { return inductance_.rotor_loops(); }
  int state_size() const { return 3 + rotor_loops() + 2; }

  /// dy/dt at time t. Throws ConditioningError for a singular system.
  void derivative(double t, const double* y, double* dydt) const;
  StateDerivative derivative(const SimulationState& state) const;

  Eigen::Vector3d supply_voltage(double t) const;
  double torque(const double* y) const;
  /// Field energy 0.5 i^T L i.
  double stored_energy(const double* y) const;
  /// Power i_s^T v_s delivered by the supply.
  double input_power(double t, const double* y) const;
  double copper_loss(const double* y) const;

  const MotorParameters& params() const { return params_; }
  const Supply& supply() const { return supply_; }
  const FaultSpec& fault() const { return fault_; }
  const Eigen::MatrixXd& rotor_resistance() const { return Rr_; }
  const InductanceModel& inductance() const { return inductance_; }

  std::vector<double> pack(const SimulationState& state) const;
  SimulationState unpack(double t, const double* y) const;

 private:
  double torque(const InductanceBundle& b, const double* y) const;

  MotorParameters params_;
  FaultSpec fault_;
  Supply supply_;
  ModelOptions options_;
  InductanceModel inductance_;
  Eigen::Matrix3d Rs_;
  Eigen::MatrixXd Rr_;

  mutable InductanceBundle bundle_;
  mutable Eigen::MatrixXd system_;
  mutable Eigen::VectorXd rhs_;
};

/// One-shot derivative for a single state. Builds a MachineModel; prefer the
/// class for repeated evaluation.
StateDerivative state_derivative(const SimulationState& state, const MotorParameters& params,
                                 const FaultSpec& fault, const Supply& supply,
                                 const ModelOptions& options = {});

struct SimulationOptions {
  double t_end = 4.0;          ///< s
  double rtol = 1e-6;
  double atol = 1e-6;
  double sample_rate = 4096.0; ///< Hz, uniform output grid
  double initial_step = 1e-6;  ///< s
  double min_step = 1e-12;     ///< s, below this the run is abandoned
  ModelOptions model;

  void validate() const;
};

/// Uniformly sampled trajectory. Row k of the matrices belongs to t[k].
struct SimulationRecord {
  double sample_rate = 0.0;
  std::vector<double> t;
  Eigen::MatrixXd i_s;  ///< samples x 3
  Eigen::MatrixXd i_r;  ///< samples x loops
  std::vector<double> omega;
  std::vector<double> theta;
  std::vector<double> torque;
  std::size_t steps = 0;

  std::size_t size() const { return t.size(); }
  int rotor_loops() const { return static_cast<int>(i_r.cols()); }
};

/// Integrates from standstill with zero currents using the Dormand-Prince
/// 4(5) pair and its dense output. Throws StiffFailureError when the step
/// size collapses.
SimulationRecord simulate(const MotorParameters& params, const FaultSpec& fault,
                          const Supply& supply, const SimulationOptions& options = {});
SimulationRecord simulate(const MachineModel& model, const SimulationOptions& options);

/// Derived quantities of one run.
struct RunMetrics {
  double mean_speed = 0.0;        ///< rad/s over the steady window
  double speed_ripple = 0.0;      ///< std / mean over the steady window
  double slip = 0.0;              ///< 1 - p omega / omega_e
  double mean_torque = 0.0;       ///< N m over the steady window
  double current_rms = 0.0;       ///< phase-A RMS over the steady window
  double peak_current = 0.0;      ///< largest |i_s| over the run
  double settle_time = 0.0;       ///< last exit from the +-2 % speed band
  double first_overshoot_time = 0.0;  ///< first speed peak above steady speed; NaN if none
  double first_overshoot_speed = 0.0;
};

/// Steady window is the last half of the record.
RunMetrics run_metrics(const SimulationRecord& record, const MotorParameters& params,
                       const Supply& supply);

}  // namespace cagesim
