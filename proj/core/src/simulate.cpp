#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "cagesim/dynamics.hpp"
#include "cagesim/error.hpp"

namespace cagesim {

namespace odeint = boost::numeric::odeint;

void SimulationOptions::validate() const {
  auto positive = [](double v, const char* field) {
    if (!std::isfinite(v) || !(v > 0.0)) throw ConfigError("must be > 0", field);
  };
  positive(t_end, "t_end");
  positive(rtol, "rtol");
  positive(atol, "atol");
  positive(sample_rate, "sample_rate");
  positive(initial_step, "initial_step");
  positive(min_step, "min_step");
}

SimulationRecord simulate(const MotorParameters& params, const FaultSpec& fault,
                          const Supply& supply, const SimulationOptions& options) {
  const MachineModel model(params, fault, supply, options.model);
  return simulate(model, options);
}

SimulationRecord simulate(const MachineModel& model, const SimulationOptions& options) {
  options.validate();
  using State = std::vector<double>;
  const int r = model.rotor_loops();
  const auto samples = static_cast<std::size_t>(std::floor(options.t_end * options.sample_rate + 1e-9)) + 1;

  SimulationRecord rec;
  rec.sample_rate = options.sample_rate;
  rec.t.resize(samples);
  rec.i_s.resize(static_cast<Eigen::Index>(samples), 3);
  rec.i_r.resize(static_cast<Eigen::Index>(samples), r);
  rec.omega.resize(samples);
  rec.theta.resize(samples);
  rec.torque.resize(samples);

  auto store = [&](std::size_t k, double t, const State& y) {
    rec.t[k] = t;
    const auto row = static_cast<Eigen::Index>(k);
    for (int c = 0; c < 3; ++c) rec.i_s(row, c) = y[c];
    for (int c = 0; c < r; ++c) rec.i_r(row, c) = y[3 + c];
    rec.omega[k] = y[3 + r];
    rec.theta[k] = y[3 + r + 1];
    rec.torque[k] = model.torque(y.data());
  };

  auto system = [&model](const State& y, State& dydt, double t) {
    model.derivative(t, y.data(), dydt.data());
  };

  State y = model.pack(SimulationState::zero(r));
  store(0, 0.0, y);
  if (samples == 1) return rec;

  auto stepper = odeint::make_dense_output(options.atol, options.rtol,
                                           odeint::runge_kutta_dopri5<State>());
  stepper.initialize(y, 0.0, options.initial_step);
  std::size_t next = 1;
  State sample(y.size());
  try {
    while (next < samples) {
      stepper.do_step(system);
      ++rec.steps;
      const double dt = stepper.current_time_step();
      const double now = stepper.current_time();
      if (dt < options.min_step) {
        throw StiffFailureError(fmt::format("step size {:.3g} s fell below {:.3g} s at t = {:.6f} s",
                                            dt, options.min_step, now));
      }
      const State& x = stepper.current_state();
      if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
        throw StiffFailureError(fmt::format("state became non-finite at t = {:.6f} s", now));
      }
      while (next < samples) {
        const double t = static_cast<double>(next) / options.sample_rate;
        if (t > now) break;
        stepper.calc_state(t, sample);
        store(next, t, sample);
        ++next;
      }
    }
  } catch (const odeint::step_adjustment_error& e) {
    throw StiffFailureError(fmt::format("step control failed at t = {:.6f} s: {}",
                                        stepper.current_time(), e.what()));
  }
  return rec;
}

RunMetrics run_metrics(const SimulationRecord& record, const MotorParameters& params,
                       const Supply& supply) {
  const std::size_t n = record.size();
  if (n < 4) throw WindowError("record too short for metrics");
  const std::size_t start = n / 2;
  const auto count = static_cast<double>(n - start);

  RunMetrics m;
  double sum = 0.0, sq = 0.0, tq = 0.0, ia = 0.0;
  for (std::size_t k = start; k < n; ++k) {
    sum += record.omega[k];
    tq += record.torque[k];
    const double i = record.i_s(static_cast<Eigen::Index>(k), 0);
    ia += i * i;
  }
  m.mean_speed = sum / count;
  for (std::size_t k = start; k < n; ++k) sq += std::pow(record.omega[k] - m.mean_speed, 2);
  m.speed_ripple = std::sqrt(sq / count) / std::abs(m.mean_speed);
  m.slip = 1.0 - params.pole_pairs * m.mean_speed / supply.omega();
  m.mean_torque = tq / count;
  m.current_rms = std::sqrt(ia / count);
  m.peak_current = record.i_s.cwiseAbs().maxCoeff();

  const double band = 0.02 * std::abs(m.mean_speed);
  m.settle_time = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    if (std::abs(record.omega[k] - m.mean_speed) > band) {
      m.settle_time = record.t[std::min(k + 1, n - 1)];
      break;
    }
  }

  m.first_overshoot_time = std::numeric_limits<double>::quiet_NaN();
  m.first_overshoot_speed = std::numeric_limits<double>::quiet_NaN();
  std::size_t k = 0;
  while (k < n && record.omega[k] <= m.mean_speed) ++k;
  if (k < n) {
    std::size_t peak = k;
    while (k < n && record.omega[k] > m.mean_speed) {
      if (record.omega[k] > record.omega[peak]) peak = k;
      ++k;
    }
    m.first_overshoot_time = record.t[peak];
    m.first_overshoot_speed = record.omega[peak];
  }
  return m;
}

}  // namespace cagesim
