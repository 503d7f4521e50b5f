#include <gtest/gtest.h>

#include <cmath>

#include "mqg/diagnostics.hpp"
#include "mqg/initial_data.hpp"
#include "mqg/verification.hpp"

using namespace mqg;

namespace {

std::vector<DiagnosticRecord> collect(double alpha, double kappa, const SpectralField& th0, double t_end,
                                      double every = 0.0) {
  SolverConfig c;
  c.alpha = alpha;
  c.kappa = kappa;
  c.n = th0.grid.n();
  c.t_end = t_end;
  c.dt_policy = CflStep{0.5};
  c.diag_every = every;
  c.snapshot_every = t_end;
  const DyadicFilterBank bank(th0.grid, FilterProfile::smooth);
  DiagnosticOptions opt;
  opt.blocks = false;
  opt.u_holder = false;
  DiagnosticCollector col(bank, opt);
  run(c, th0, {&col});
  return col.records;
}

}  // namespace

TEST(Exponents, WorkedValues) {
  EXPECT_NEAR(interpolated_exponent(0.2, 20.0), 0.18, 1e-15);
  EXPECT_NEAR(interpolated_exponent(0.8, 20.0), 0.72, 1e-15);
  EXPECT_NEAR(improved_exponent(0.2, 0.5), 0.3, 1e-15);
  EXPECT_NEAR(improved_exponent(0.8, 0.3), 0.95, 1e-15);
  EXPECT_NEAR(improved_exponent(0.5, 0.5), 0.75, 1e-15);
  EXPECT_EQ(bootstrap_case(0.18, 0.5), BootstrapCase::doubling);
  EXPECT_EQ(bootstrap_case(0.72, 0.3), BootstrapCase::alpha_shift);
  EXPECT_EQ(bootstrap_case(0.5, 0.5), BootstrapCase::alpha_shift);
  EXPECT_NEAR(target_exponent(0.18, 0.5), 0.36, 1e-15);
  EXPECT_NEAR(target_exponent(0.72, 0.3), 1.02, 1e-15);
}

TEST(Exponents, Properties) {
  for (double alpha = 0.05; alpha <= 1.0; alpha += 0.05) {
    double prev = -1.0;
    for (double delta = 0.01; delta < 1.0; delta += 0.01) {
      const double d = improved_exponent(delta, alpha);
      EXPECT_GT(d, prev);
      EXPECT_LE(d, 1.5 * delta + 1e-15);
      EXPECT_LE(d, delta + 0.5 * alpha + 1e-15);
      prev = d;
      for (double p : {4.0, 20.0}) {
        const double d1 = interpolated_exponent(delta, p);
        EXPECT_EQ(bootstrap_case(d1, alpha) == BootstrapCase::doubling, d1 < alpha);
      }
    }
  }
}

TEST(Energy, SingleModeAndZeroData) {
  const Grid2D g(16);
  // Records every 1e-4 keep the trapezoidal error in time below the tolerance.
  const auto recs = collect(0.5, 1.0, single_mode(g, 1, 0, 1.0), 0.1, 1e-4);
  ASSERT_EQ(recs.size(), 1001u);
  EXPECT_LE(energy_report(recs, 1.0).relative_residual, 1e-8);

  const auto zero = collect(0.5, 1.0, SpectralField(g), 0.5);
  EXPECT_EQ(energy_report(zero, 1.0).residual, 0.0);
  EXPECT_THROW(energy_report({zero.front()}, 1.0), Error);
}

TEST(Energy, RandomDataBalance) {
  const auto recs = collect(0.5, 0.1, spectral_decay(Grid2D(64), 2.0, 7, 1.0), 0.5);
  const EnergyReport r = energy_report(recs, 0.1);
  EXPECT_GT(r.dissipated, 0.0);
  EXPECT_LE(r.relative_residual, 1e-6);
}

TEST(LinfDecay, SingleModeRatioPeaksAtOne) {
  const Grid2D g(32);
  const auto recs = collect(1.0, 1.0, single_mode(g, 1, 0, 1.0), 4.0, 0.05);
  const LinfDecayReport r = linf_decay_check(recs, 1.0, 1.0);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.t_at_sup, 1.0, 1e-12);
  EXPECT_NEAR(r.sup_ratio, std::exp(-1.0) / std::sqrt(2.0 * kPi * kPi), 1e-12);
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    EXPECT_NEAR(r.ratio[i], r.t[i] * std::exp(-r.t[i]) / std::sqrt(2.0 * kPi * kPi), 1e-12);
  }
}

TEST(LinfDecay, ZeroDataAndSyntheticViolations) {
  const auto zero = collect(0.5, 1.0, SpectralField(Grid2D(16)), 1.0, 0.25);
  const LinfDecayReport z = linf_decay_check(zero, 1.0, 0.5);
  for (double r : z.ratio) EXPECT_EQ(r, 0.0);
  EXPECT_TRUE(z.passed);

  std::vector<DiagnosticRecord> recs(5);
  for (int i = 0; i < 5; ++i) {
    recs[i].t = i;
    recs[i].l2 = 1.0;
    recs[i].linf = 1.0 / (1.0 + i);
  }
  EXPECT_TRUE(linf_decay_check(recs, 1.0, 1.0).monotone);
  // r(t) = t / (1 + t) keeps growing over the tail.
  EXPECT_FALSE(linf_decay_check(recs, 1.0, 1.0).bounded);
  recs[3].linf = 0.5;
  EXPECT_FALSE(linf_decay_check(recs, 1.0, 1.0).monotone);
}

TEST(UHolder, HomogeneousAndDegenerate) {
  const Grid2D g(64);
  const DyadicFilterBank bank(g, FilterProfile::smooth);
  const SpectralField f = single_mode(g, 1, 0, 1.0);
  const UHolderRatio a = u_holder_check(bank, f, 0.5);
  const UHolderRatio b = u_holder_check(bank, 10.0 * f, 0.5);
  EXPECT_TRUE(std::isfinite(a.max()));
  EXPECT_GT(a.max(), 0.0);
  EXPECT_NEAR(a.max(), b.max(), 1e-12 * a.max());
  EXPECT_THROW(u_holder_check(bank, SpectralField(g), 0.5), DegenerateField);
  EXPECT_THROW(u_holder_check(bank, f, 1.0), Error);
}

TEST(UHolder, StableUnderRefinement) {
  const auto r = u_holder_refinement(spectral_decay(Grid2D(64), 2.0, 3, 1.0),
                                     spectral_decay(Grid2D(128), 2.0, 3, 1.0), 0.5,
                                     FilterProfile::smooth);
  EXPECT_TRUE(r.passed) << r.coarse << " " << r.fine;
}

TEST(Scaling, ExactCases) {
  const Grid2D g(32);
  EXPECT_LE(scaling_invariance_check(single_mode(g, 1, 0, 1.0), 0.5, 1.0, 1.0, CflStep{0.5}).discrepancy,
            1e-10);
  EXPECT_EQ(scaling_invariance_check(SpectralField(g), 0.5, 1.0, 1.0, CflStep{0.5}).discrepancy, 0.0);
  EXPECT_LE(scaling_invariance_check(two_mode(g, 1, 0, 1.0, 0, 2, 1.0), 0.5, 0.1, 0.5, FixedStep{0.01})
                .discrepancy,
            1e-6);
}

TEST(Paraproduct, IdentitiesOnRandomFields) {
  const Grid2D g(32);
  const DyadicFilterBank bank(g, FilterProfile::sharp);
  const SpectralField th = dealias(random_field(g, 3));
  std::vector<int> shells;
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) shells.push_back(j);
  const ParaproductReport r = paraproduct_identity_suite(bank, velocity(th, 0.5), th, shells);
  EXPECT_LE(r.max_defect, 1e-10);
  EXPECT_LE(r.max_i12_relative, 1e-10);
  EXPECT_LE(r.max_split_defect, 1e-10);
  EXPECT_GT(r.max_commutator_constant, 0.0);
  EXPECT_TRUE(std::isfinite(r.max_commutator_constant));
  EXPECT_GE(r.quadrature_grid, 5 * g.dealias_cutoff());

  const DyadicFilterBank smooth(g, FilterProfile::smooth);
  EXPECT_LE(paraproduct_identity_suite(smooth, velocity(th, 0.5), th, shells).max_defect, 1e-10);

  const ParaproductReport z = paraproduct_identity_suite(bank, VelocityField(g), th, {2, 3});
  for (const auto& s : z.shells) {
    EXPECT_EQ(s.I1, 0.0);
    EXPECT_EQ(s.I12, 0.0);
    EXPECT_EQ(s.I3, 0.0);
  }
}

TEST(Paraproduct, GradientVelocityBreaksTheCancellation) {
  const Grid2D g(32);
  const DyadicFilterBank bank(g, FilterProfile::sharp);
  const SpectralField th = dealias(random_field(g, 5));
  const SpectralField phi = fractional_laplacian(dealias(random_field(g, 6)), -1.0);
  const VelocityField grad(derivative(phi, 0), derivative(phi, 1));
  EXPECT_GT(paraproduct_identity_suite(bank, grad, th, {2, 3}).max_i12_relative, 1e-3);
}

TEST(Lemma, SmallSweepMeetsBounds) {
  const auto rows = lemma_sweep({2.0, 4.0}, {0.3, 1.0}, 4, 32);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.passed);
    EXPECT_GT(r.samples, 0);
    EXPECT_NEAR(r.empirical_c, 1.0 / r.min_ratio, 1e-15);
    if (r.p == 2.0) {
      EXPECT_GE(r.min_ratio, std::exp2(-r.alpha) - 1e-10);
    }
  }
  EXPECT_THROW(lemma_sweep({kInf}, {0.5}, 1, 32), Error);
  EXPECT_THROW(lemma_sweep({1.5}, {0.5}, 1, 32), Error);
}

TEST(Bernstein, UpperConstantIsOrderOne) {
  const Grid2D g(64);
  const DyadicFilterBank bank(g, FilterProfile::sharp);
  const double c = bernstein_upper_constant(bank, dealias(random_field(g, 9)), 4.0);
  EXPECT_GT(c, 0.25);
  EXPECT_LE(c, 2.0);
}

TEST(Bootstrap, ReportArithmeticAtSmallScale) {
  BootstrapParams p;
  p.n = 32;
  p.t_end = 0.5;
  p.records = 5;
  const BootstrapReport r = bootstrap_experiment(p);
  EXPECT_NEAR(r.delta1, 0.18, 1e-15);
  EXPECT_NEAR(r.target, 0.36, 1e-15);
  EXPECT_NEAR(r.delta_prime, 0.3, 1e-15);
  EXPECT_NEAR(r.predicted_gain, 0.1, 1e-15);
  EXPECT_EQ(r.regime, BootstrapCase::doubling);
  ASSERT_EQ(r.times.size(), 6u);
  ASSERT_EQ(r.series_coarse.size(), 3u);
  EXPECT_EQ(r.series_fine[0].size(), r.times.size());
  EXPECT_NEAR(r.divergence_threshold, std::exp2(0.5 * 0.18), 1e-15);
  EXPECT_NEAR(r.measured_gain, std::log2(r.initial_growth / r.late_growth), 1e-15);
  EXPECT_EQ(r.passed, r.diverges_initially && r.uniform_late);
  // Rough data: the target norm grows with n at t = 0.
  EXPECT_GT(r.initial_growth, 1.0);
}
