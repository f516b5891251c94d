#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "cagesim/dynamics.hpp"
#include "cagesim/inductance.hpp"
#include "cagesim/model.hpp"
#include "cagesim/spectrum.hpp"

namespace {

const cagesim::MotorParameters kMotor{};
const cagesim::EccentricityConfig kMixed{0.2, 0.15, 0.0, 0.0};

void BM_BundleExact(benchmark::State& state) {
  double theta = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cagesim::inductance_bundle(kMotor, kMixed, theta));
    theta += 1e-3;
  }
}
BENCHMARK(BM_BundleExact)->Unit(benchmark::kMicrosecond);

void BM_BundleTabulated(benchmark::State& state) {
  const cagesim::InductanceModel model(kMotor, kMixed);
  cagesim::InductanceBundle b;
  double theta = 0.1;
  for (auto _ : state) {
    model.evaluate(theta, b);
    benchmark::DoNotOptimize(b.Lsr.data());
    theta += 1e-3;
  }
}
BENCHMARK(BM_BundleTabulated)->Unit(benchmark::kMicrosecond);

// Argument: number of broken bars merged away by loop elimination.
void BM_StateDerivative(benchmark::State& state) {
  cagesim::FaultSpec fault;
  fault.eccentricity = kMixed;
  fault.bar_model = cagesim::BarModel::LoopElimination;
  for (int k = 1; k <= state.range(0); ++k) fault.broken_bars.push_back(k);
  const cagesim::MachineModel model(kMotor, fault, cagesim::Supply{});
  std::vector<double> y(static_cast<std::size_t>(model.state_size()), 0.0), dy(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = std::sin(0.7 * static_cast<double>(k));
  double t = 0.0;
  for (auto _ : state) {
    model.derivative(t, y.data(), dy.data());
    benchmark::DoNotOptimize(dy.data());
    t += 1e-5;
  }
  state.SetLabel(std::to_string(model.rotor_loops()) + " loops");
}
BENCHMARK(BM_StateDerivative)->Arg(0)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_Spectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = std::cos(2.0 * cagesim::kPi * 50.0 * static_cast<double>(k) / 4096.0);
  cagesim::SpectrumOptions o;
  o.hann = true;
  for (auto _ : state) benchmark::DoNotOptimize(cagesim::compute_spectrum(x, 4096.0, o));
}
BENCHMARK(BM_Spectrum)->Arg(8192)->Arg(65536)->Unit(benchmark::kMicrosecond);

void BM_ShortStartUp(benchmark::State& state) {
  cagesim::SimulationOptions o;
  o.t_end = 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(cagesim::simulate(kMotor, cagesim::FaultSpec{}, cagesim::Supply{}, o));
}
BENCHMARK(BM_ShortStartUp)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
