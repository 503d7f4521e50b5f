#include <gtest/gtest.h>

#include <cmath>

#include "mqg/initial_data.hpp"
#include "mqg/integrator.hpp"

using namespace mqg;

namespace {

SolverConfig config(double alpha, double kappa, int n, DtPolicy dt, double t_end) {
  SolverConfig c;
  c.alpha = alpha;
  c.kappa = kappa;
  c.n = n;
  c.dt_policy = dt;
  c.t_end = t_end;
  c.diag_every = t_end;
  c.snapshot_every = t_end;
  return c;
}

SpectralField two_mode_data(int n) { return two_mode(Grid2D(n), 1, 0, 1.0, 0, 2, 1.0); }

class Throwing : public Sink {
 public:
  void on_diagnostic(const SimulationState& s) override {
    if (s.steps >= 2) throw std::runtime_error("disk full");
  }
};

}  // namespace

TEST(Config, Validation) {
  EXPECT_NO_THROW(config(0.5, 1.0, 32, CflStep{0.5}, 1.0).validate());
  EXPECT_THROW(config(0.0, 1.0, 32, CflStep{0.5}, 1.0).validate(), ConfigError);
  EXPECT_THROW(config(1.5, 1.0, 32, CflStep{0.5}, 1.0).validate(), ConfigError);
  EXPECT_THROW(config(0.5, 0.0, 32, CflStep{0.5}, 1.0).validate(), ConfigError);
  EXPECT_THROW(config(0.5, 1.0, 33, CflStep{0.5}, 1.0).validate(), ConfigError);
  EXPECT_THROW(config(0.5, 1.0, 32, FixedStep{0.0}, 1.0).validate(), ConfigError);
  EXPECT_THROW(config(0.5, 1.0, 32, CflStep{1.5}, 1.0).validate(), ConfigError);
  EXPECT_THROW(config(0.5, 1.0, 32, CflStep{0.5}, -1.0).validate(), ConfigError);
  EXPECT_THROW(run(config(0.5, 1.0, 32, CflStep{0.5}, 1.0), two_mode_data(64)), ConfigError);
}

TEST(Run, PlaneWaveDecaysExactly) {
  const Grid2D g(32);
  for (double alpha : {0.3, 1.0}) {
    const SpectralField th0 = single_mode(g, 3, 4, 1.0);
    const SimulationState s = run(config(alpha, 0.5, 32, CflStep{0.5}, 1.0), th0);
    const double expect = std::exp(-0.5 * std::pow(5.0, alpha));
    EXPECT_LT(relative_l2_difference(s.theta, expect * th0), 1e-12);
    EXPECT_DOUBLE_EQ(s.t, 1.0);
  }
}

TEST(Run, ZeroDurationNotifiesOnce) {
  StateRecorder rec;
  const SimulationState s = run(config(0.5, 1.0, 16, CflStep{0.5}, 0.0), two_mode_data(16), {&rec});
  EXPECT_EQ(s.steps, 0);
  ASSERT_EQ(rec.states.size(), 1u);
  EXPECT_EQ(rec.states[0].t, 0.0);
}

TEST(Run, CadenceLandsOnEventTimes) {
  SolverConfig c = config(0.5, 1.0, 32, CflStep{0.5}, 1.0);
  c.diag_every = 0.25;
  StateRecorder rec;
  run(c, two_mode_data(32), {&rec});
  ASSERT_EQ(rec.states.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(rec.states[i].t, 0.25 * i, 1e-14);
  EXPECT_EQ(rec.states.back().t, 1.0);

  c.diag_every = 0.0;
  StateRecorder every;
  const SimulationState s = run(c, two_mode_data(32), {&every});
  EXPECT_EQ(every.states.size(), static_cast<std::size_t>(s.steps) + 1);
}

TEST(Run, ResultIsBitwiseReproducible) {
  const SolverConfig c = config(0.5, 0.1, 32, CflStep{0.5}, 0.5);
  const SpectralField th0 = spectral_decay(Grid2D(32), 1.0, 3, 1.0);
  const SimulationState a = run(c, th0), b = run(c, th0);
  ASSERT_EQ(a.steps, b.steps);
  for (std::size_t i = 0; i < a.theta.coeffs.size(); ++i) EXPECT_EQ(a.theta.coeffs[i], b.theta.coeffs[i]);
}

TEST(Run, MeanZeroAndHermitianInvariants) {
  const SimulationState s = run(config(0.5, 0.1, 32, CflStep{0.5}, 0.5), spectral_decay(Grid2D(32), 1.0, 5, 1.0));
  EXPECT_EQ(s.theta.at(0, 0), Complex{});
  s.theta.grid.for_each_mode([&](std::size_t i, int k1, int k2) {
    if (!s.theta.grid.resolves(-k1, -k2)) return;
    EXPECT_EQ(s.theta.coeffs[i], std::conj(s.theta.at(-k1, -k2)));
  });
}

TEST(Run, EnergyDoesNotIncrease) {
  SolverConfig c = config(0.5, 0.1, 32, CflStep{0.5}, 1.0);
  c.diag_every = 0.0;
  StateRecorder rec;
  run(c, spectral_decay(Grid2D(32), 1.0, 2, 1.0), {&rec});
  for (std::size_t i = 1; i < rec.states.size(); ++i) {
    EXPECT_LE(spectral_energy(rec.states[i].theta), spectral_energy(rec.states[i - 1].theta));
  }
}

TEST(Run, FourthOrderInTime) {
  const int n = 32;
  const double t_end = 0.5;
  auto solve = [&](double dt) { return run(config(0.5, 0.1, n, FixedStep{dt}, t_end), two_mode_data(n)).theta; };
  const SpectralField ref = solve(0.05 / 32.0);
  const double e1 = relative_l2_difference(solve(0.05), ref);
  const double e2 = relative_l2_difference(solve(0.025), ref);
  const double e3 = relative_l2_difference(solve(0.0125), ref);
  EXPECT_GE(std::log2(e1 / e2), 3.7);
  EXPECT_GE(std::log2(e2 / e3), 3.7);
}

TEST(Run, SelfConvergenceOfTwoModeData) {
  const double t_end = 0.5;
  const SimulationState coarse = run(config(1.0, 0.1, 32, FixedStep{0.01}, t_end), two_mode_data(32));
  const SimulationState fine = run(config(1.0, 0.1, 128, FixedStep{0.01 / 16}, t_end), two_mode_data(128));
  EXPECT_LT(relative_l2_difference(coarse.theta, resample(fine.theta, 32)), 1e-6);
}

TEST(Step, CflPolicyRejectsOversizedSteps) {
  const SolverConfig c = config(0.5, 1.0, 32, CflStep{0.5}, 1.0);
  const SimulationState s = make_state(c, two_mode_data(32));
  const double bound = cfl_dt(s) / 0.5;
  EXPECT_THROW(step(s, 2.0 * bound), Error);
  const SimulationState next = step(s, cfl_dt(s));
  EXPECT_EQ(next.steps, 1);
  EXPECT_DOUBLE_EQ(next.t, cfl_dt(s));
}

TEST(Step, CflBoundFormula) {
  const SolverConfig c = config(1.0, 50.0, 32, CflStep{0.5}, 1.0);
  const SimulationState s = make_state(c, single_mode(Grid2D(32), 1, 0, 1.0));
  // max|u| = 1 for theta = cos(x1) at alpha = 1; the dissipation cap 0.1/kappa is smaller.
  EXPECT_NEAR(velocity_linf(velocity(s.theta, 1.0)), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(cfl_dt(s), 0.5 * std::min(kTwoPi / 32.0, 0.1 / 50.0));
}

TEST(Step, CflExamples) {
  // |u|_inf = 1 at n = 256 with a negligible dissipation cap.
  const SolverConfig c = config(1.0, 1e-3, 256, CflStep{0.5}, 1.0);
  const SimulationState s = make_state(c, single_mode(Grid2D(256), 1, 0, 1.0));
  EXPECT_NEAR(cfl_dt(s), 0.5 * kTwoPi / 256.0, 1e-15);
  EXPECT_NEAR(cfl_dt(s), 1.227e-2, 1e-5);

  const SolverConfig d = config(1.0, 1e-3, 128, CflStep{0.5}, 1.0);
  const SimulationState s2 = make_state(d, single_mode(Grid2D(128), 1, 0, 1.0));
  EXPECT_NEAR(cfl_dt(s2), 2.0 * cfl_dt(s), 1e-15);

  const SolverConfig z = config(1.0, 2.0, 32, CflStep{0.5}, 1.0);
  const SimulationState s3 = make_state(z, SpectralField(Grid2D(32)));
  EXPECT_DOUBLE_EQ(cfl_dt(s3), 0.5 * 0.1 / 2.0);
}

TEST(Guard, LargeUnstableStepBlowsUp) {
  SolverConfig c = config(1.0, 1e-6, 32, FixedStep{5.0}, 50.0);
  EXPECT_THROW(run(c, 1e3 * spectral_decay(Grid2D(32), 0.5, 1, 1.0)), BlowUp);
}

TEST(Sinks, FailuresAreWrappedWithTimeAndStep) {
  SolverConfig c = config(0.5, 1.0, 16, CflStep{0.5}, 1.0);
  c.diag_every = 0.0;
  Throwing bad;
  try {
    run(c, two_mode_data(16), {&bad});
    FAIL() << "expected SinkFailure";
  } catch (const SinkFailure& e) {
    EXPECT_NE(std::string(e.what()).find("step 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("disk full"), std::string::npos);
  }
}
