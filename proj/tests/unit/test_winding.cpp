#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cagesim/error.hpp"
#include "cagesim/winding.hpp"
#include "oracles.hpp"

namespace cagesim {
namespace {

const WindingLayout kLayout{};
constexpr double kN = 56.0;
const double kGamma = kPi / 86.0;
const double kPitch = kTwoPi / 40.0;

double piecewise_reference(BasicFunction kind, double phi) {
  switch (kind) {
    case BasicFunction::AS: return oracle::stator_turns(kN, phi);
    case BasicFunction::BS: return std::pow(oracle::stator_turns(kN, phi), 2);
    case BasicFunction::CS: return oracle::stator_turns(kN, phi) * oracle::stator_turns(kN, phi - 2.0 * kPi / 3.0);
    case BasicFunction::AR: return oracle::loop_turns(kPitch, kGamma, phi);
    case BasicFunction::BR: return std::pow(oracle::loop_turns(kPitch, kGamma, phi), 2);
    case BasicFunction::CR: return oracle::loop_turns(kPitch, kGamma, phi) * oracle::loop_turns(kPitch, kGamma, phi + kPitch);
  }
  return 0.0;
}

std::vector<double> reference_cuts(BasicFunction kind) {
  if (is_stator(kind)) return oracle::lattice(0.0, kPi / 6.0);
  return {kGamma, kPitch, kPitch + kGamma};
}

constexpr BasicFunction kAllKinds[] = {BasicFunction::AS, BasicFunction::BS, BasicFunction::CS,
                                       BasicFunction::AR, BasicFunction::BR, BasicFunction::CR};

TEST(BasicFunctions, PointValues) {
  EXPECT_DOUBLE_EQ(basic_function_value(BasicFunction::AS, kLayout, kPi / 3.0), 2.0 * kN);
  EXPECT_DOUBLE_EQ(basic_function_value(BasicFunction::BS, kLayout, kPi / 3.0), 4.0 * kN * kN);
  EXPECT_DOUBLE_EQ(basic_function_value(BasicFunction::AR, kLayout, kGamma / 2.0), 0.5);
  EXPECT_DOUBLE_EQ(basic_function_value(BasicFunction::CR, kLayout, kGamma / 2.0), 0.25);
}

TEST(BasicFunctions, MatchIndependentPiecewiseDefinitions) {
  for (BasicFunction kind : kAllKinds) {
    for (int k = 0; k < 10000; ++k) {
      const double phi = kTwoPi * k / 10000.0;
      EXPECT_NEAR(basic_function_value(kind, kLayout, phi), piecewise_reference(kind, phi),
                  1e-9 * (is_stator(kind) ? kN * kN : 1.0))
          << to_string(kind) << " phi=" << phi;
    }
  }
}

TEST(BasicFunctions, SquaresAndOverlapsHoldPointwise) {
  for (int k = 0; k < 10000; ++k) {
    const double phi = kTwoPi * k / 10000.0;
    const double as = basic_function_value(BasicFunction::AS, kLayout, phi);
    const double ar = basic_function_value(BasicFunction::AR, kLayout, phi);
    EXPECT_DOUBLE_EQ(basic_function_value(BasicFunction::BS, kLayout, phi), as * as);
    EXPECT_DOUBLE_EQ(basic_function_value(BasicFunction::BR, kLayout, phi), ar * ar);
    const double cr = basic_function_value(BasicFunction::CR, kLayout, phi);
    EXPECT_NEAR(cr, ar * basic_function_value(BasicFunction::AR, kLayout, phi + kPitch), 1e-12);
    if (phi > kGamma) EXPECT_EQ(cr, 0.0);
    // Loops two apart never overlap.
    EXPECT_EQ(shifted(BasicFunction::AR, kLayout, 1, phi) * shifted(BasicFunction::AR, kLayout, 3, phi), 0.0);
  }
}

TEST(BasicFunctions, RotorLoopsPartitionUnity) {
  for (int k = 0; k < 5000; ++k) {
    const double phi = kTwoPi * k / 5000.0;
    double sum = 0.0;
    for (int i = 1; i <= kLayout.bars; ++i) sum += shifted(BasicFunction::AR, kLayout, i, phi);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Shifted, PhaseAndLoopShifts) {
  EXPECT_DOUBLE_EQ(shifted(BasicFunction::AS, kLayout, 2, 2.0 * kPi / 3.0 + kPi / 3.0), 2.0 * kN);
  for (double phi : {0.01, 0.05, 1.0, 3.0}) {
    EXPECT_EQ(shifted(BasicFunction::AR, kLayout, 1, phi), basic_function_value(BasicFunction::AR, kLayout, phi));
  }
}

TEST(Shifted, StatorProductIsProductOfPhases) {
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      if (i == j) continue;
      for (int k = 0; k < 2000; ++k) {
        const double phi = kTwoPi * k / 2000.0;
        const double ref = oracle::stator_turns(kN, phi - 2.0 * kPi * (i - 1) / 3.0) *
                           oracle::stator_turns(kN, phi - 2.0 * kPi * (j - 1) / 3.0);
        EXPECT_NEAR(shifted(BasicFunction::CS, kLayout, i, j, phi), ref, 1e-9 * kN * kN);
      }
    }
  }
}

TEST(Shifted, AdjacentOverlapIsProductWithPreviousLoop) {
  for (int i = 1; i <= kLayout.bars; i += 7) {
    const int prev = i == 1 ? kLayout.bars : i - 1;
    for (int k = 0; k < 4000; ++k) {
      const double phi = kTwoPi * k / 4000.0;
      EXPECT_NEAR(shifted(BasicFunction::CR, kLayout, i, phi),
                  shifted(BasicFunction::AR, kLayout, i, phi) * shifted(BasicFunction::AR, kLayout, prev, phi), 1e-12);
    }
  }
}

TEST(Shifted, IndexErrors) {
  EXPECT_THROW(shifted(BasicFunction::AS, kLayout, 0, 0.1), IndexError);
  EXPECT_THROW(shifted(BasicFunction::AS, kLayout, 4, 0.1), IndexError);
  EXPECT_THROW(shifted(BasicFunction::AR, kLayout, 41, 0.1), IndexError);
  EXPECT_THROW(shifted(BasicFunction::CS, kLayout, 2, 2, 0.1), IndexError);
  EXPECT_THROW(shifted(BasicFunction::CS, kLayout, 1, 0.1), IndexError);
}

TEST(WindingLayout, Validation) {
  EXPECT_NO_THROW(kLayout.validate());
  WindingLayout bad = kLayout;
  bad.bars = 2;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = kLayout;
  bad.gamma_bar = kTwoPi / 40.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = kLayout;
  bad.pole_pairs = 3;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = kLayout;
  bad.turns = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(FourierSet, MeanValues) {
  EXPECT_DOUBLE_EQ(fourier_set(BasicFunction::AS, kLayout, 5).a0, 56.0);
  EXPECT_NEAR(fourier_set(BasicFunction::BR, kLayout, 5).a0, 0.0230620155, 1e-10);
  EXPECT_NEAR(fourier_set(BasicFunction::CR, kLayout, 5).a0, 9.6899225e-4, 1e-11);
  EXPECT_THROW(fourier_set(BasicFunction::AS, kLayout, 1), ConfigError);
}

TEST(FourierSet, CoefficientsMatchNumericalIntegration) {
  for (BasicFunction kind : kAllKinds) {
    const FourierSeriesSet set = fourier_set(kind, kLayout, 12);
    const double period = is_stator(kind) ? kPi : kTwoPi;
    const int mult = set.angular_multiplier;
    const std::vector<double> cuts = reference_cuts(kind);
    auto f = [kind](double x) { return piecewise_reference(kind, x); };
    const double scale = is_stator(kind) ? kN * kN : 1.0;
    EXPECT_NEAR(set.a0, oracle::integrate(f, 0.0, period, cuts) / period, 1e-10 * scale) << to_string(kind);
    for (const Harmonic& h : set.harmonics) {
      const double a = 2.0 / period *
                       oracle::integrate([&](double x) { return f(x) * std::cos(mult * h.k * x); }, 0.0, period, cuts);
      const double b = 2.0 / period *
                       oracle::integrate([&](double x) { return f(x) * std::sin(mult * h.k * x); }, 0.0, period, cuts);
      EXPECT_NEAR(h.a, a, 1e-9 * scale) << to_string(kind) << " k=" << h.k;
      EXPECT_NEAR(h.b, b, 1e-9 * scale) << to_string(kind) << " k=" << h.k;
    }
  }
}

double reconstruction_error(BasicFunction kind, int k_max) {
  const FourierSeriesSet set = fourier_set(kind, kLayout, k_max);
  double err = 0.0, norm = 0.0;
  const int samples = 40000;
  for (int k = 0; k < samples; ++k) {
    const double phi = kTwoPi * (k + 0.5) / samples;
    const double ref = basic_function_value(kind, kLayout, phi);
    err += std::pow(set(phi) - ref, 2);
    norm += ref * ref;
  }
  return std::sqrt(err / norm);
}

TEST(FourierSet, ReconstructionErrorBelowOnePercent) {
  for (BasicFunction kind : {BasicFunction::AS, BasicFunction::BS, BasicFunction::CS, BasicFunction::AR}) {
    EXPECT_LT(reconstruction_error(kind, 300), 0.01) << to_string(kind);
  }
}

TEST(FourierSet, NarrowRotorProductsNeedMoreOrders) {
  // BR and CR vary over a single bar angle, so 300 orders leave a truncation
  // tail above 1%. The measured error must equal the Parseval tail of the
  // closed-form coefficients, and enough orders bring it under 1%.
  for (BasicFunction kind : {BasicFunction::BR, BasicFunction::CR}) {
    const FourierSeriesSet all = fourier_set(kind, kLayout, 60000);
    double tail = 0.0, power = all.a0 * all.a0;
    for (const Harmonic& h : all.harmonics) {
      const double e = 0.5 * (h.a * h.a + h.b * h.b);
      power += e;
      if (h.k > 300) tail += e;
    }
    const double predicted = std::sqrt(tail / power);
    EXPECT_NEAR(reconstruction_error(kind, 300), predicted, 0.02 * predicted) << to_string(kind);
    EXPECT_GT(predicted, 0.01) << to_string(kind);
    EXPECT_LT(reconstruction_error(kind, 2000), 0.01) << to_string(kind);
  }
}

TEST(FourierSet, StatorTurnsHaveOnlyOddOrders) {
  const FourierSeriesSet set = fourier_set(BasicFunction::AS, kLayout, 40);
  for (const Harmonic& h : set.harmonics) {
    if (h.k % 2 == 0) {
      EXPECT_EQ(h.a, 0.0);
      EXPECT_EQ(h.b, 0.0);
    } else {
      EXPECT_GT(std::hypot(h.a, h.b), 0.0) << h.k;
    }
  }
}

TEST(RotorTurnIntegrals, ClosedValues) {
  const double g = kGamma;
  EXPECT_NEAR(rotor_turn_integrals(kLayout, g).k_r, g / 2.0, 1e-16);
  EXPECT_NEAR(rotor_turn_integrals(kLayout, g).m_r, g * g / 6.0, 1e-17);
  for (double extra : {0.0, 0.1, 2.0}) {
    EXPECT_NEAR(rotor_turn_integrals(kLayout, kPitch + g + extra).k_r, kPitch, 1e-15);
  }
  const RotorTurnIntegrals neg = rotor_turn_integrals(kLayout, -0.3);
  EXPECT_EQ(neg.k_r, 0.0);
  EXPECT_EQ(neg.m_r, 0.0);
}

TEST(RotorTurnIntegrals, AreRunningIntegralsAndContinuous) {
  const std::vector<double> cuts{kGamma, kPitch, kPitch + kGamma};
  for (double phi : {0.001, kGamma, 0.1, kPitch, kPitch + 0.5 * kGamma, kPitch + kGamma, 0.4, 1.3}) {
    const RotorTurnIntegrals r = rotor_turn_integrals(kLayout, phi);
    const double k_ref = oracle::integrate([](double x) { return oracle::loop_turns(kPitch, kGamma, x); }, 0.0, phi, cuts);
    const double m_ref = oracle::integrate([](double x) { return rotor_turn_integrals(kLayout, x).k_r; }, 0.0, phi, cuts);
    EXPECT_NEAR(r.n_r, oracle::loop_turns(kPitch, kGamma, phi), 1e-12);
    EXPECT_NEAR(r.k_r, k_ref, 1e-13) << phi;
    EXPECT_NEAR(r.m_r, m_ref, 1e-13) << phi;
  }
  for (double b : {kGamma, kPitch, kPitch + kGamma}) {
    const RotorTurnIntegrals lo = rotor_turn_integrals(kLayout, b - 1e-12);
    const RotorTurnIntegrals hi = rotor_turn_integrals(kLayout, b + 1e-12);
    EXPECT_NEAR(lo.k_r, hi.k_r, 1e-10);
    EXPECT_NEAR(lo.m_r, hi.m_r, 1e-12);
  }
}

TEST(GeneralizedWinding, UniformGapSubtractsPlainMean) {
  const GapState uniform = GapState::concentric();
  const TurnFunction loop = rotor_loop_turns(kLayout, 1, 0.0);
  for (double phi : {0.01, 0.1, 2.0}) {
    EXPECT_NEAR(generalized_winding_function(loop, uniform, phi),
                basic_function_value(BasicFunction::AR, kLayout, phi) - 1.0 / 40.0, 1e-12);
  }
  const TurnFunction phase = stator_phase_turns(kLayout, 1);
  const double offset = winding_offset(phase, uniform);
  const double mean = oracle::integrate(
                          [&](double x) { return phase.value(x) - offset; }, 0.0, kTwoPi,
                          oracle::lattice(0.0, kPi / 6.0)) /
                      kTwoPi;
  EXPECT_NEAR(mean, 0.0, 1e-10);
}

TEST(GeneralizedWinding, WeightedMeanVanishesUnderEccentricity) {
  const GapState gap = gap_state(EccentricityConfig{0.5, 0.0, 0.0, 0.0}, 0.0);
  const TurnFunction phase = stator_phase_turns(kLayout, 1);
  const double value = oracle::integrate(
                           [&](double x) { return gap.permeance(x) * generalized_winding_function(phase, gap, x); },
                           0.0, kTwoPi, oracle::lattice(0.0, kPi / 6.0)) /
                       kTwoPi;
  EXPECT_NEAR(value, 0.0, 1e-10);
}

TEST(GeneralizedWinding, WeightedMeanVanishesForAnyGapState) {
  auto gen = oracle::rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 12; ++s) {
    const double ds = 0.6 * u(gen);
    const EccentricityConfig cfg{ds, (0.7 - ds) * u(gen), kTwoPi * u(gen), kTwoPi * u(gen)};
    const double theta = kTwoPi * u(gen);
    const GapState gap = gap_state(cfg, theta);
    const TurnFunction fn = (s % 2 == 0) ? stator_phase_turns(kLayout, 1 + s % 3)
                                         : rotor_loop_turns(kLayout, 1 + (7 * s) % 40, theta);
    const double offset = winding_offset(fn, gap);
    std::vector<double> cuts = fn.breakpoints;
    const double weighted = oracle::integrate(
        [&](double x) { return gap.permeance(x) * (fn.value(x) - offset); }, 0.0, kTwoPi, cuts);
    const double scale = oracle::integrate(
        [&](double x) { return gap.permeance(x) * std::abs(fn.value(x)); }, 0.0, kTwoPi, cuts);
    EXPECT_LT(std::abs(weighted), 1e-9 * scale);
  }
}

}  // namespace
}  // namespace cagesim
