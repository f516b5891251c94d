#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cagesim/error.hpp"
#include "cagesim/inductance.hpp"
#include "oracles.hpp"

namespace cagesim {
namespace {

const MotorParameters kMotor{};
const WindingLayout kLayout = kMotor.layout();
const double kL0 = kMotor.l0();
constexpr double kN = 56.0;
const double kGamma = kPi / 86.0;
const double kPitch = kTwoPi / 40.0;

InductanceOptions no_skew() {
  InductanceOptions o;
  o.skew = false;
  return o;
}

double stator_ref(int i, double phi) { return oracle::stator_turns(kN, phi - 2.0 * kPi * (i - 1) / 3.0); }
double loop_ref(int j, double theta, double phi) {
  return oracle::loop_turns(kPitch, kGamma, phi - kPitch * (j - 1) - theta);
}

std::vector<double> all_cuts(double theta) {
  std::vector<double> c = oracle::lattice(0.0, kPi / 6.0);
  for (int j = 0; j < 40; ++j) {
    for (double b : {0.0, kGamma, kPitch}) {
      double x = std::fmod(theta + kPitch * j + b, kTwoPi);
      if (x < 0) x += kTwoPi;
      c.push_back(x);
    }
  }
  return c;
}

double mean_of(const std::function<double(double)>& f, double theta) {
  return oracle::integrate(f, 0.0, kTwoPi, all_cuts(theta)) / kTwoPi;
}

double rel(double a, double b, double scale) { return std::abs(a - b) / scale; }

TEST(WeightedAverage, ConcentricCollapsesToMeans) {
  const GapState g = GapState::concentric();
  EXPECT_DOUBLE_EQ(weighted::stator_turns(g, kLayout, 2).value, kN);
  EXPECT_NEAR(weighted::rotor_squared(g, kLayout, 5, 0.3).value, 1.0 / 40.0 - kGamma / (6.0 * kPi), 1e-16);
  EXPECT_NEAR(weighted::rotor_adjacent(g, kLayout, 5, 0.3).value, kGamma / (12.0 * kPi), 1e-16);
}

TEST(WeightedAverage, StaticEccentricityAgainstQuadrature) {
  const GapState g = gap_state(EccentricityConfig{0.5, 0.0, 0.0, 0.0}, 0.0);
  const double ref = mean_of([&](double x) { return g.permeance(x) * stator_ref(1, x); }, 0.0);
  EXPECT_NEAR(weighted::stator_turns(g, kLayout, 1).value, ref, 1e-6 * std::abs(ref));
}

TEST(WeightedAverage, AllSevenAgainstQuadrature) {
  auto gen = oracle::rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 8; ++s) {
    const double ds = 0.7 * u(gen);
    const EccentricityConfig cfg{ds, (0.7 - ds) * u(gen), kTwoPi * u(gen), kTwoPi * u(gen)};
    const double theta = kTwoPi * u(gen);
    const GapState g = gap_state(cfg, theta);
    const int i = 1 + s % 3, j = 1 + (s + 1) % 3;
    const int a = 1 + (11 * s) % 40;
    const int prev = a == 1 ? 40 : a - 1;
    auto P = [&](double x) { return g.permeance(x); };

    const double as = mean_of([&](double x) { return P(x) * stator_ref(i, x); }, theta);
    const double bs = mean_of([&](double x) { return P(x) * std::pow(stator_ref(i, x), 2); }, theta);
    const double cs = mean_of([&](double x) { return P(x) * stator_ref(i, x) * stator_ref(j, x); }, theta);
    const double ar = mean_of([&](double x) { return P(x) * loop_ref(a, theta, x); }, theta);
    const double br = mean_of([&](double x) { return P(x) * std::pow(loop_ref(a, theta, x), 2); }, theta);
    const double cr = mean_of([&](double x) { return P(x) * loop_ref(a, theta, x) * loop_ref(prev, theta, x); }, theta);
    const double sr = mean_of([&](double x) { return P(x) * stator_ref(i, x) * loop_ref(a, theta, x); }, theta);

    EXPECT_NEAR(weighted::stator_turns(g, kLayout, i).value, as, 1e-9 * std::abs(as));
    EXPECT_NEAR(weighted::stator_squared(g, kLayout, i).value, bs, 1e-9 * std::abs(bs));
    EXPECT_NEAR(weighted::stator_product(g, kLayout, i, j).value, cs, 1e-9 * std::abs(cs));
    EXPECT_NEAR(weighted::rotor_turns(g, kLayout, a, theta).value, ar, 1e-9 * std::abs(ar));
    EXPECT_NEAR(weighted::rotor_squared(g, kLayout, a, theta).value, br, 1e-9 * std::abs(br));
    EXPECT_NEAR(weighted::rotor_adjacent(g, kLayout, a, theta).value, cr, 1e-9 * std::abs(cr));
    EXPECT_NEAR(weighted::stator_rotor(g, kLayout, i, a, theta).value, sr, 1e-9 * kN / 40.0);
  }
}

TEST(UniformGap, ClosedFormMatrices) {
  const InductanceBundle b = inductance_bundle(kMotor, EccentricityConfig{}, 0.37, no_skew());
  const double n = 40.0;
  const double lb = kMotor.bar_leakage, le = kMotor.end_ring_leakage;
  EXPECT_NEAR(kL0, 1.4237697906068942e-05, 1e-19);
  EXPECT_NEAR(b.Ls(0, 0), 0.22719823176515955, 1e-15);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double expected = i == j ? 14.0 * kPi / 9.0 * kL0 * kN * kN + kMotor.stator_leakage
                                     : -2.0 * kPi / 3.0 * kL0 * kN * kN;
      EXPECT_NEAR(b.Ls(i, j), expected, 1e-14 * std::abs(expected));
    }
  }
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 40; ++j) {
      const int d = std::abs(i - j);
      double expected;
      if (d == 0) {
        expected = kL0 * (kTwoPi / n - kTwoPi / (n * n) - kGamma / 3.0) + 2.0 * (lb + le);
      } else if (d == 1 || d == 39) {
        expected = kL0 * (-kTwoPi / (n * n) + kGamma / 6.0) - lb;
      } else {
        expected = -kTwoPi * kL0 / (n * n);
      }
      EXPECT_NEAR(b.Lr(i, j), expected, 1e-14 * std::abs(b.Lr(0, 0))) << i << "," << j;
    }
  }
}

TEST(UniformGap, MutualReducesToHealthyProfile) {
  for (double theta : {0.0, 0.2, 1.0, 2.9}) {
    for (int i = 1; i <= 3; ++i) {
      for (int j : {1, 2, 17, 40}) {
        const double mapped = theta - kTwoPi * (i - 1) / 3.0 + kPitch * (j - 1);
        const double m = kL0 * healthy_mutual_profile(kLayout, mapped).value;
        for (MutualMethod method : {MutualMethod::Exact, MutualMethod::LocalPermeance}) {
          const Sensitive s = mutual_stator_rotor(kMotor, EccentricityConfig{}, theta, i, j, method);
          EXPECT_NEAR(s.value, m, 1e-12 * kL0 * kN) << theta << " " << i << " " << j;
        }
      }
    }
  }
}

TEST(HealthyProfile, MatchesQuadratureAndIsPiPeriodic) {
  for (double t : {0.0, 0.05, 0.4, 1.2, 2.0, 3.1}) {
    const double ref = oracle::integrate([&](double x) { return stator_ref(1, x) * loop_ref(1, t, x); }, 0.0, kTwoPi,
                                         all_cuts(t)) -
                       kTwoPi * kN / 40.0;
    EXPECT_NEAR(healthy_mutual_profile(kLayout, t).value, ref, 1e-10 * kN);
    EXPECT_NEAR(healthy_mutual_profile(kLayout, t + kPi).value, healthy_mutual_profile(kLayout, t).value, 1e-10 * kN);
  }
}

TEST(Oracle, SymmetricAndMatchesUniformSelf) {
  const TurnFunction a1 = stator_phase_turns(kLayout, 1);
  const double self = quadrature_oracle(a1, a1, GapState::concentric(), kL0);
  const double ref = 14.0 * kPi / 9.0 * kL0 * kN * kN;
  EXPECT_NEAR(self, ref, 1e-6 * ref);

  auto gen = oracle::rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 50; ++s) {
    const double ds = 0.6 * u(gen);
    const EccentricityConfig cfg{ds, (0.7 - ds) * u(gen), kTwoPi * u(gen), kTwoPi * u(gen)};
    const double theta = kTwoPi * u(gen);
    const GapState g = gap_state(cfg, theta);
    const TurnFunction x = (s % 2) ? stator_phase_turns(kLayout, 1 + s % 3) : rotor_loop_turns(kLayout, 1 + s % 40, theta);
    const TurnFunction y = rotor_loop_turns(kLayout, 1 + (3 * s) % 40, theta);
    const double xy = quadrature_oracle(x, y, g, kL0, 4000);
    const double yx = quadrature_oracle(y, x, g, kL0, 4000);
    EXPECT_NEAR(xy, yx, 1e-10 * std::max(std::abs(xy), 1e-12));
  }
}

TEST(Oracle, LegacyWindingFunctionBreaksReciprocity) {
  const GapState g = gap_state(EccentricityConfig{0.4, 0.0, 0.0, 0.0}, 0.0);
  const TurnFunction x = stator_phase_turns(kLayout, 1);
  const TurnFunction y = rotor_loop_turns(kLayout, 3, 0.0);
  const double xy = legacy_quadrature(x, y, g, kL0);
  const double yx = legacy_quadrature(y, x, g, kL0);
  EXPECT_GT(std::abs(xy - yx), 1e-3 * std::max(std::abs(xy), std::abs(yx)));
  // The uniform gap restores it.
  const GapState u = GapState::concentric();
  EXPECT_NEAR(legacy_quadrature(x, y, u, kL0), legacy_quadrature(y, x, u, kL0), 1e-12);
}

TEST(Mutual, ExactMatchesOracle) {
  auto gen = oracle::rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const EccentricityConfig cfg{0.2, 0.15, 0.0, 0.0};
  for (int s = 0; s < 20; ++s) {
    const double theta = kTwoPi * u(gen);
    const int i = 1 + static_cast<int>(3 * u(gen));
    const int j = 1 + static_cast<int>(40 * u(gen));
    const GapState g = gap_state(cfg, theta);
    const double ref = quadrature_oracle(stator_phase_turns(kLayout, i), rotor_loop_turns(kLayout, j, theta), g, kL0);
    const double got = mutual_stator_rotor(kMotor, cfg, theta, i, j).value;
    EXPECT_LT(rel(got, ref, kL0 * 2.0 * kN * kPitch), 2e-3);
    EXPECT_NEAR(got, ref, 1e-9 * kL0 * kN);
  }
}

TEST(Mutual, LocalPermeanceApproximationError) {
  // Characterizes the loop-centre approximation against the exact integral.
  const EccentricityConfig cfg{0.2, 0.15, 0.0, 0.0};
  double worst = 0.0, peak = 0.0;
  for (double theta : {0.0, 1.0, 2.5}) {
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 40; ++j) {
        const double exact = mutual_stator_rotor(kMotor, cfg, theta, i, j).value;
        const double approx = mutual_stator_rotor(kMotor, cfg, theta, i, j, MutualMethod::LocalPermeance).value;
        worst = std::max(worst, std::abs(exact - approx));
        peak = std::max(peak, std::abs(exact));
      }
    }
  }
  EXPECT_LT(worst / peak, 5e-3);
}

TEST(Bundle, SymmetricWithPositiveMagnetizingSelfTerms) {
  InductanceOptions o;
  o.leakage = false;
  for (const EccentricityConfig& cfg : {EccentricityConfig{0.3, 0.2, 0.1, 0.5}, EccentricityConfig{0.0, 0.6, 0, 0}}) {
    const InductanceBundle b = inductance_bundle(kMotor, cfg, 0.8, o);
    EXPECT_LT((b.Ls - b.Ls.transpose()).cwiseAbs().maxCoeff(), 1e-12 * b.Ls.cwiseAbs().maxCoeff());
    EXPECT_LT((b.Lr - b.Lr.transpose()).cwiseAbs().maxCoeff(), 1e-12 * b.Lr.cwiseAbs().maxCoeff());
    EXPECT_GT(b.Ls.diagonal().minCoeff(), 0.0);
    EXPECT_GT(b.Lr.diagonal().minCoeff(), 0.0);
  }
}

TEST(Bundle, ClosedFormsMatchOracleMatrices) {
  const EccentricityConfig cfg{0.3, 0.1, 0.0, 0.0};
  InductanceOptions o = no_skew();
  o.leakage = false;
  const InductanceBundle b = inductance_bundle(kMotor, cfg, 1.0, o);
  const OracleMatrices q = oracle_matrices(kMotor, cfg, 1.0);
  EXPECT_LT((b.Ls - q.Ls).cwiseAbs().maxCoeff() / q.Ls.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((b.Lr - q.Lr).cwiseAbs().maxCoeff() / q.Lr.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((b.Lsr - q.Lsr).cwiseAbs().maxCoeff() / q.Lsr.cwiseAbs().maxCoeff(), 1e-9);
}

double block_derivative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& fd) {
  const double scale = std::max(fd.cwiseAbs().maxCoeff(), 1e-30);
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

TEST(Bundle, DerivativesMatchFiniteDifferences) {
  auto gen = oracle::rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-5;
  for (int s = 0; s < 50; ++s) {
    const double ds = 0.7 * u(gen);
    const EccentricityConfig cfg{ds, (0.7 - ds) * u(gen), kTwoPi * u(gen), kTwoPi * u(gen)};
    const double theta = kTwoPi * u(gen);
    InductanceOptions o;
    o.skew_self_blocks = (s % 2 == 0);
    const InductanceBundle b = inductance_bundle(kMotor, cfg, theta, o);
    const InductanceBundle p = inductance_bundle(kMotor, cfg, theta + h, o);
    const InductanceBundle m = inductance_bundle(kMotor, cfg, theta - h, o);
    const Eigen::MatrixXd dLs = (p.Ls - m.Ls) / (2 * h);
    const Eigen::MatrixXd dLr = (p.Lr - m.Lr) / (2 * h);
    const Eigen::MatrixXd dLsr = (p.Lsr - m.Lsr) / (2 * h);
    if (dLs.cwiseAbs().maxCoeff() > 1e-12) EXPECT_LT(block_derivative_error(b.dLs, dLs), 1e-4) << s;
    if (dLr.cwiseAbs().maxCoeff() > 1e-12) EXPECT_LT(block_derivative_error(b.dLr, dLr), 1e-4) << s;
    EXPECT_LT(block_derivative_error(b.dLsr, dLsr), 1e-4) << s;
  }
}

TEST(Bundle, StaticEccentricityKeepsStatorBlockConstant) {
  const EccentricityConfig cfg{0.5, 0.0, 0.0, 0.0};
  const Eigen::Matrix3d ref = inductance_bundle(kMotor, cfg, 0.0).Ls;
  for (double theta : {0.3, 1.7, 4.0}) {
    EXPECT_LT((inductance_bundle(kMotor, cfg, theta).Ls - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Bundle, PeriodicInTheta) {
  const EccentricityConfig mixed{0.2, 0.2, 0.3, 0.9};
  const InductanceBundle a = inductance_bundle(kMotor, mixed, 0.7);
  const InductanceBundle b = inductance_bundle(kMotor, mixed, 0.7 + kTwoPi);
  EXPECT_LT((a.Lsr - b.Lsr).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a.Lr - b.Lr).cwiseAbs().maxCoeff(), 1e-15);
  // Half-turn periodicity of the mutual holds for the concentric 4-pole machine.
  const InductanceBundle c = inductance_bundle(kMotor, EccentricityConfig{}, 0.7);
  const InductanceBundle d = inductance_bundle(kMotor, EccentricityConfig{}, 0.7 + kPi);
  EXPECT_LT((c.Lsr - d.Lsr).cwiseAbs().maxCoeff(), 1e-12);
  // A static offset breaks it: the first permeance harmonic changes sign
  // under a half-turn of the loop.
  const EccentricityConfig stat{0.4, 0.0, 0.3, 0.0};
  const InductanceBundle e = inductance_bundle(kMotor, stat, 0.7);
  const InductanceBundle f = inductance_bundle(kMotor, stat, 0.7 + kPi);
  EXPECT_GT((e.Lsr - f.Lsr).cwiseAbs().maxCoeff(), 0.05 * e.Lsr.cwiseAbs().maxCoeff());
}

TEST(Skew, ThreePointAverage) {
  EXPECT_DOUBLE_EQ(skew_correct([](double) { return 3.5; }, 0.2, 1.0), 3.5);
  EXPECT_DOUBLE_EQ(skew_correct([](double t) { return std::sin(t); }, 0.0, 0.4), std::sin(0.4));
  for (double g : {0.05, 0.3}) {
    for (double t : {0.0, 0.7, 2.0}) {
      EXPECT_NEAR(skew_correct([](double x) { return std::cos(x); }, g, t), std::cos(t) * (1.0 + std::cos(g / 2.0)) / 2.0,
                  1e-15);
    }
  }
}

TEST(Errors, IndexRanges) {
  EXPECT_THROW(mutual_stator_rotor(kMotor, {}, 0.0, 0, 1), IndexError);
  EXPECT_THROW(mutual_stator_rotor(kMotor, {}, 0.0, 1, 41), IndexError);
  EXPECT_THROW(weighted::stator_product(GapState{}, kLayout, 2, 2), IndexError);
}

}  // namespace
}  // namespace cagesim
