#include "cagesim/dynamics.hpp"

#include <cmath>
#include <set>
#include <string>

#include <Eigen/LU>

#include "cagesim/error.hpp"

namespace cagesim {

void FaultSpec::validate(int bars) const {
  eccentricity.validate();
  if (!std::isfinite(broken_factor) || !(broken_factor > 0.0)) {
    throw ConfigError("must be > 0", "broken_factor");
  }
  std::set<int> seen;
  for (int b : broken_bars) {
    if (b < 1 || b > bars) {
      throw IndexError("broken bar " + std::to_string(b) + " not in 1.." + std::to_string(bars));
    }
    if (!seen.insert(b).second) throw ConfigError("duplicate bar " + std::to_string(b), "broken_bars");
  }
  if (bar_model == BarModel::LoopElimination) LoopReduction::merge_broken(bars, broken_bars);
}

ResistanceMatrices resistance_matrices(const MotorParameters& params, const FaultSpec& fault) {
  const int n = params.bars;
  Eigen::VectorXd bar = Eigen::VectorXd::Constant(n, params.bar_resistance);
  if (fault.bar_model == BarModel::ResistanceScaling) {
    for (int b : fault.broken_bars) bar(b - 1) = fault.broken_factor * params.bar_resistance;
  }
  ResistanceMatrices r;
  r.Rs = Eigen::Matrix3d::Identity() * params.stator_resistance;
  r.Rr = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n;
    const int next = (i + 1) % n;
    r.Rr(i, i) = bar(prev) + bar(i) + 2.0 * params.end_ring_resistance;
    r.Rr(i, next) -= bar(i);
    r.Rr(next, i) -= bar(i);
  }
  return r;
}

ReducedMatrices reduced_matrices_loop_elimination(const MotorParameters& params,
                                                  const std::vector<int>& broken_bars,
                                                  const EccentricityConfig& gap, double theta,
                                                  const InductanceOptions& options) {
  ReducedMatrices out;
  out.reduction = LoopReduction::merge_broken(params.bars, broken_bars);
  const Eigen::MatrixXd T = out.reduction.matrix();
  FaultSpec healthy;
  out.Rr = T.transpose() * resistance_matrices(params, healthy).Rr * T;
  const InductanceBundle b = inductance_bundle(params, gap, theta, options);
  out.Lr = T.transpose() * b.Lr * T;
  out.Lsr = b.Lsr * T;
  return out;
}

SimulationState SimulationState::zero(int rotor_loops) {
  SimulationState s;
  s.i_r = Eigen::VectorXd::Zero(rotor_loops);
  return s;
}

namespace {

LoopReduction reduction_for(const MotorParameters& params, const FaultSpec& fault) {
  if (fault.bar_model == BarModel::LoopElimination) {
    return LoopReduction::merge_broken(params.bars, fault.broken_bars);
  }
  return LoopReduction::identity(params.bars);
}

}  // namespace

MachineModel::MachineModel(const MotorParameters& params, const FaultSpec& fault,
                           const Supply& supply, const ModelOptions& options)
    : params_(params),
      fault_(fault),
      supply_(supply),
      options_(options),
      inductance_(params, fault.eccentricity, options.inductance, reduction_for(params, fault)) {
  fault_.validate(params_.bars);
  supply_.validate();
  const ResistanceMatrices r = resistance_matrices(params_, fault_);
  Rs_ = r.Rs;
  const Eigen::MatrixXd T = inductance_.reduction().matrix();
  Rr_ = T.transpose() * r.Rr * T;
  const int size = 3 + rotor_loops() + (options_.isolated_neutral ? 1 : 0);
  system_.resize(size, size);
  rhs_.resize(size);
}

Eigen::Vector3d MachineModel::supply_voltage(double t) const {
  // Phase axes sit 2pi/3 mechanical apart, i.e. -2pi/3 electrical at two pole
  // pairs, so phase b leads for a field turning towards +theta.
  const double w = supply_.omega() * t;
  const double v = supply_.peak_voltage;
  const double shift = kTwoPi / 3.0;
  return {v * std::cos(w), v * std::cos(w + shift), v * std::cos(w - shift)};
}

double MachineModel::torque(const InductanceBundle& b, const double* y) const {
  const int r = rotor_loops();
  const Eigen::Map<const Eigen::Vector3d> is(y);
  const Eigen::Map<const Eigen::VectorXd> ir(y + 3, r);
  return 0.5 * is.dot(b.dLs * is) + is.dot(b.dLsr * ir) + 0.5 * ir.dot(b.dLr * ir);
}

double MachineModel::torque(const double* y) const {
  inductance_.evaluate(y[3 + rotor_loops() + 1], bundle_);
  return torque(bundle_, y);
}

double MachineModel::stored_energy(const double* y) const {
  const int r = rotor_loops();
  inductance_.evaluate(y[3 + r + 1], bundle_);
  const Eigen::Map<const Eigen::Vector3d> is(y);
  const Eigen::Map<const Eigen::VectorXd> ir(y + 3, r);
  return 0.5 * is.dot(bundle_.Ls * is) + is.dot(bundle_.Lsr * ir) + 0.5 * ir.dot(bundle_.Lr * ir);
}

double MachineModel::input_power(double t, const double* y) const {
  return Eigen::Map<const Eigen::Vector3d>(y).dot(supply_voltage(t));
}

double MachineModel::copper_loss(const double* y) const {
  const Eigen::Map<const Eigen::Vector3d> is(y);
  const Eigen::Map<const Eigen::VectorXd> ir(y + 3, rotor_loops());
  return is.dot(Rs_ * is) + ir.dot(Rr_ * ir);
}

void MachineModel::derivative(double t, const double* y, double* dydt) const {
  const int r = rotor_loops();
  const double omega = y[3 + r];
  const double theta = y[3 + r + 1];
  const Eigen::Map<const Eigen::Vector3d> is(y);
  const Eigen::Map<const Eigen::VectorXd> ir(y + 3, r);
  inductance_.evaluate(theta, bundle_);
  const InductanceBundle& b = bundle_;

  system_.topLeftCorner(3, 3) = b.Ls;
  system_.block(0, 3, 3, r) = b.Lsr;
  system_.block(3, 0, r, 3) = b.Lsr.transpose();
  system_.block(3, 3, r, r) = b.Lr;
  rhs_.head(3) = supply_voltage(t) - Rs_ * is - omega * (b.dLs * is + b.dLsr * ir);
  rhs_.segment(3, r).noalias() = -Rr_ * ir;
  rhs_.segment(3, r).noalias() -= omega * (b.dLsr.transpose() * is + b.dLr * ir);
  if (options_.isolated_neutral) {
    // Floating star point: its potential is the multiplier that keeps the
    // stator currents summing to zero.
    const int k = 3 + r;
    system_.row(k).setZero();
    system_.col(k).setZero();
    system_.block(k, 0, 1, 3).setOnes();
    system_.block(0, k, 3, 1).setOnes();
    rhs_(k) = 0.0;
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system_);
  const Eigen::VectorXd x = lu.solve(rhs_);
  if (!x.allFinite()) {
    throw ConditioningError("inductance system singular at theta = " + std::to_string(theta) +
                            " (rcond " + std::to_string(lu.rcond()) + ")");
  }
  for (int k = 0; k < 3 + r; ++k) dydt[k] = x(k);
  dydt[3 + r] = (torque(b, y) - params_.load_torque) / params_.inertia;
  dydt[3 + r + 1] = omega;
}

std::vector<double> MachineModel::pack(const SimulationState& s) const {
  const int r = rotor_loops();
  if (s.i_r.size() != r) {
    throw ConfigError("state has " + std::to_string(s.i_r.size()) + " rotor currents, model has " +
                      std::to_string(r));
  }
  std::vector<double> y(static_cast<std::size_t>(state_size()));
  for (int k = 0; k < 3; ++k) y[k] = s.i_s(k);
  for (int k = 0; k < r; ++k) y[3 + k] = s.i_r(k);
  y[3 + r] = s.omega;
  y[3 + r + 1] = s.theta;
  return y;
}

SimulationState MachineModel::unpack(double t, const double* y) const {
  const int r = rotor_loops();
  SimulationState s;
  s.i_s = Eigen::Map<const Eigen::Vector3d>(y);
  s.i_r = Eigen::Map<const Eigen::VectorXd>(y + 3, r);
  s.omega = y[3 + r];
  s.theta = y[3 + r + 1];
  s.t = t;
  return s;
}

StateDerivative MachineModel::derivative(const SimulationState& state) const {
  const std::vector<double> y = pack(state);
  std::vector<double> dy(y.size());
  derivative(state.t, y.data(), dy.data());
  const int r = rotor_loops();
  StateDerivative d;
  d.di_s = Eigen::Map<const Eigen::Vector3d>(dy.data());
  d.di_r = Eigen::Map<const Eigen::VectorXd>(dy.data() + 3, r);
  d.domega = dy[3 + r];
  d.dtheta = dy[3 + r + 1];
  d.torque = torque(bundle_, y.data());
  if (options_.isolated_neutral) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system_);
    d.neutral_voltage = lu.solve(rhs_)(3 + r);
  }
  return d;
}

StateDerivative state_derivative(const SimulationState& state, const MotorParameters& params,
                                 const FaultSpec& fault, const Supply& supply,
                                 const ModelOptions& options) {
  return MachineModel(params, fault, supply, options).derivative(state);
}

}  // namespace cagesim
