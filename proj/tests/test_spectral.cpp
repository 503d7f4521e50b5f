#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mqg/initial_data.hpp"
#include "mqg/spectral.hpp"

using namespace mqg;

namespace {

SpectralField random_dealiased(const Grid2D& g, std::uint64_t seed) {
  SpectralField f = dealias(random_field(g, seed));
  f.at(0, 0) = 0.0;
  return f;
}

}  // namespace

TEST(Grid, WavenumberLayoutFollowsFftOrder) {
  const Grid2D g(16);
  EXPECT_EQ(g.wavenumber(0), 0);
  EXPECT_EQ(g.wavenumber(8), 8);
  EXPECT_EQ(g.wavenumber(9), -7);
  EXPECT_EQ(g.wavenumber(15), -1);
  for (int k = -7; k <= 8; ++k) EXPECT_EQ(g.wavenumber(g.slot(k)), k);
  EXPECT_EQ(g.dealias_cutoff(), 5);
  EXPECT_THROW(Grid2D(7), Error);
  EXPECT_THROW(Grid2D(6), Error);
}

TEST(Transform, SampledPlaneWaveHasHalfAmplitudeCoefficients) {
  const Grid2D g(32);
  const auto f = PhysicalField::sample(g, [](double x, double y) { return 0.6 * std::cos(3 * x + 4 * y); });
  const SpectralField c = to_spectral(f);
  EXPECT_NEAR(c.at(3, 4).real(), 0.3, 1e-15);
  EXPECT_NEAR(c.at(-3, -4).real(), 0.3, 1e-15);
  double rest = 0.0;
  g.for_each_mode([&](std::size_t i, int k1, int k2) {
    if (std::abs(k1) == 3 && std::abs(k2) == 4 && k1 * k2 > 0) return;
    rest = std::max(rest, std::abs(c.coeffs[i]));
  });
  EXPECT_LT(rest, 1e-15);
}

TEST(Transform, RoundTripAndMeanPolicy) {
  const Grid2D g(32);
  const SpectralField f = random_dealiased(g, 3);
  EXPECT_LT(relative_l2_difference(to_spectral(to_physical(f)), f), 1e-14);

  const auto shifted = PhysicalField::sample(g, [](double x, double) { return 1.0 + std::cos(x); });
  EXPECT_THROW(to_spectral(shifted), NonZeroMean);
}

TEST(Transform, RejectsNonHermitianCoefficients) {
  const Grid2D g(16);
  SpectralField f(g);
  f.at(1, 0) = Complex(1.0, 0.0);
  EXPECT_THROW(to_physical(f), BrokenSymmetry);
}

TEST(Transform, PairTransformMatchesSeparateTransforms) {
  const Grid2D g(32);
  const SpectralField a = random_dealiased(g, 1), b = random_dealiased(g, 2);
  auto [pa, pb] = to_physical_pair(a, b);
  const PhysicalField ra = to_physical(a), rb = to_physical(b);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(pa.values[i], ra.values[i], 1e-14);
    EXPECT_NEAR(pb.values[i], rb.values[i], 1e-14);
  }
}

TEST(FractionalLaplacian, EigenvaluesAndSemigroup) {
  const Grid2D g(64);
  const SpectralField f = single_mode(g, 5, 12, 1.0);
  for (double s : {-2.0, -0.7, 0.3, 1.0, 2.0}) {
    EXPECT_LT(relative_l2_difference(fractional_laplacian(f, s), std::pow(13.0, s) * f), 1e-14);
  }
  const SpectralField r = random_dealiased(g, 4);
  EXPECT_LT(relative_l2_difference(fractional_laplacian(fractional_laplacian(r, 0.4), 0.9),
                                   fractional_laplacian(r, 1.3)),
            1e-14);
  // Lambda^2 is -Laplacian.
  const SpectralField lap = -1.0 * (derivative(derivative(r, 0), 0) + derivative(derivative(r, 1), 1));
  EXPECT_LT(relative_l2_difference(fractional_laplacian(r, 2.0), lap), 1e-14);
  EXPECT_THROW(fractional_laplacian(r, 2.5), Error);
}

TEST(Velocity, SingleModeValues) {
  const Grid2D g(32);
  // theta = cos(x1): u = |k|^{alpha-1} (0, -sin x1) with |k| = 1.
  const VelocityField u = velocity(single_mode(g, 1, 0, 1.0), 0.4);
  const PhysicalField u1 = to_physical(u.u1), u2 = to_physical(u.u2);
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      EXPECT_NEAR(u1.at(i, j), 0.0, 1e-15);
      EXPECT_NEAR(u2.at(i, j), -std::sin(i * g.spacing()), 1e-14);
    }
  }
  // theta = cos(2 x2) with alpha = 0.5: u1 = 2^{-1/2} sin(2 x2).
  const VelocityField v = velocity(single_mode(g, 0, 2, 1.0), 0.5);
  const PhysicalField v1 = to_physical(v.u1);
  for (int j = 0; j < g.n(); ++j) {
    EXPECT_NEAR(v1.at(3, j), std::sqrt(0.5) * std::sin(2 * j * g.spacing()), 1e-14);
  }
}

TEST(Velocity, DivergenceFreeAndAnnihilatesItsOwnShell) {
  const Grid2D g(64);
  const SpectralField th = random_dealiased(g, 9);
  const VelocityField u = velocity(th, 0.5);
  const SpectralField div = derivative(u.u1, 0) + derivative(u.u2, 1);
  EXPECT_LT(spectral_l2(div), 1e-13 * spectral_l2(derivative(u.u1, 0)));

  // A function of a single plane wave is transported by a velocity parallel to its level sets.
  const SpectralField wave = single_mode(g, 3, 4, 1.0);
  EXPECT_LT(spectral_l2(advect(velocity(wave, 0.7), wave)), 1e-14);
}

TEST(Advect, MatchesDirectConvolutionSum) {
  const Grid2D g(16);
  const SpectralField th = random_dealiased(g, 21);
  const VelocityField u = velocity(random_dealiased(g, 22), 0.6);
  const SpectralField fast = advect(u, th);

  const int c = g.dealias_cutoff();
  double worst = 0.0, scale = 0.0;
  for (int k1 = -c; k1 <= c; ++k1) {
    for (int k2 = -c; k2 <= c; ++k2) {
      Complex acc{};
      if (k1 != 0 || k2 != 0) {
        for (int p1 = -c; p1 <= c; ++p1) {
          for (int p2 = -c; p2 <= c; ++p2) {
            const int q1 = k1 - p1, q2 = k2 - p2;
            if (std::abs(q1) > c || std::abs(q2) > c) continue;
            const Complex tq = th.at(q1, q2);
            acc += u.u1.at(p1, p2) * Complex(0.0, q1) * tq + u.u2.at(p1, p2) * Complex(0.0, q2) * tq;
          }
        }
      }
      worst = std::max(worst, std::abs(acc - fast.at(k1, k2)));
      scale = std::max(scale, std::abs(acc));
    }
  }
  EXPECT_LT(worst, 1e-14 * scale);
}

TEST(Dealias, KeepsOnlyTheTwoThirdsBox) {
  const Grid2D g(24);
  SpectralField f = random_field(g, 5);
  const SpectralField d = dealias(f);
  g.for_each_mode([&](std::size_t i, int k1, int k2) {
    if (std::max(std::abs(k1), std::abs(k2)) > 8) {
      EXPECT_EQ(d.coeffs[i], Complex{});
    } else {
      EXPECT_EQ(d.coeffs[i], f.coeffs[i]);
    }
  });
}

TEST(Norms, ClosedFormLebesgueNorms) {
  const Grid2D g(32);
  const PhysicalField f = to_physical(single_mode(g, 1, 0, 1.0));
  // int cos^2 = 2 pi^2, int cos^4 = 3 pi^2 / 2 over the torus.
  EXPECT_NEAR(lp_norm(f, 2.0), std::sqrt(2.0 * kPi * kPi), 1e-13);
  EXPECT_NEAR(lp_norm(f, 4.0), std::pow(1.5 * kPi * kPi, 0.25), 1e-12);
  EXPECT_NEAR(lp_norm(f, kInf), 1.0, 1e-15);

  // cos x1 + cos x2: int |f|^4 = 4 pi^2 (3/8 + 3/8 + 6/4).
  const PhysicalField s = to_physical(two_mode(g, 1, 0, 1.0, 0, 1, 1.0));
  EXPECT_NEAR(lp_norm(s, 4.0), std::pow(4.0 * kPi * kPi * 2.25, 0.25), 1e-12);
}

TEST(Norms, QuadratureAgainstDirectTrigonometricSum) {
  const Grid2D g(32);
  SpectralField f(g);
  f.set_pair(1, 2, Complex(0.3, -0.1));
  f.set_pair(3, -1, Complex(-0.2, 0.25));
  f.set_pair(0, 4, Complex(0.1, 0.0));
  // Independent check: evaluate the trigonometric sum on a finer grid directly.
  const int m = 64;
  double sum = 0.0;
  const double h = kTwoPi / m;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double x = i * h, y = j * h;
      double v = 0.0;
      for (auto [k1, k2] : {std::pair{1, 2}, std::pair{3, -1}, std::pair{0, 4}}) {
        v += 2.0 * std::real(f.at(k1, k2) * std::polar(1.0, k1 * x + k2 * y));
      }
      sum += std::pow(v, 4.0);
    }
  }
  const double oracle = std::pow(sum * h * h, 0.25);
  EXPECT_NEAR(lp_norm(to_physical(f), 4.0), oracle, 1e-8 * oracle);
}

TEST(Norms, ParsevalAndSobolev) {
  const Grid2D g(32);
  const SpectralField f = single_mode(g, 3, 4, 0.8);
  EXPECT_NEAR(spectral_l2(f), lp_norm(to_physical(f), 2.0), 1e-13);
  EXPECT_NEAR(sobolev_seminorm(f, 1.0), 5.0 * 0.8 * std::sqrt(2.0) * kPi, 1e-12);
  EXPECT_NEAR(sobolev_seminorm(f, 0.0), spectral_l2(f), 1e-14);
}

TEST(Resample, RefineThenCoarsenIsIdentity) {
  const Grid2D g(32);
  const SpectralField f = random_dealiased(g, 8);
  const SpectralField up = resample(f, 96);
  EXPECT_EQ(up.grid.n(), 96);
  EXPECT_NEAR(spectral_l2(up), spectral_l2(f), 1e-14);
  EXPECT_LT(relative_l2_difference(resample(up, 32), f), 1e-15);
}

TEST(Dilate, MapsModesToDoubledWavenumbers) {
  const Grid2D g(16);
  const SpectralField f = single_mode(g, 1, 2, 0.5);
  const SpectralField d = dilate(f, 2);
  EXPECT_EQ(d.grid.n(), 32);
  EXPECT_LT(relative_l2_difference(d, single_mode(Grid2D(32), 2, 4, 0.5)), 1e-15);
  EXPECT_LT(dilation_discrepancy(f, d, 2), 1e-15);
}
