#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mqg/error.hpp"
#include "mqg/fft.hpp"
#include "mqg/grid.hpp"

namespace mqg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline std::vector<Complex> inverse_raw(const SpectralField& f) {
  std::vector<Complex> out(f.coeffs.size());
  fft::backward(f.grid.n(), f.coeffs, out);
  return out;
}

// Makes c(-k) = conj(c(k)) hold bit-for-bit. Transform round-off otherwise
// leaves an antisymmetric residue at the size of the largest coefficient,
// which swamps small dyadic blocks.
inline void enforce_hermitian(SpectralField& f) {
  const Grid2D& g = f.grid;
  const int n = g.n();
  for (int a = 0; a < n; ++a) {
    const int ma = (n - a) % n;
    for (int b = 0; b < n; ++b) {
      const int mb = (n - b) % n;
      const std::size_t i = static_cast<std::size_t>(a) * n + b;
      const std::size_t j = static_cast<std::size_t>(ma) * n + mb;
      if (j < i) continue;
      const Complex avg = 0.5 * (f.coeffs[i] + std::conj(f.coeffs[j]));
      f.coeffs[i] = avg;
      f.coeffs[j] = std::conj(avg);
    }
  }
}

// Forward transform of real values without the mean guard.
inline SpectralField forward_raw(const Grid2D& g, std::span<const double> values) {
  std::vector<Complex> in(values.begin(), values.end());
  SpectralField out(g);
  fft::forward(g.n(), in, out.coeffs);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : out.coeffs) c *= scale;
  enforce_hermitian(out);
  return out;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

/// Forward transform to Fourier-series coefficients.
///
/// The zero mode is pinned to 0. A spatial mean of at least mean_tol (default
/// 1e-12 max|f|) is rejected with NonZeroMean.
inline SpectralField to_spectral(const PhysicalField& f, double mean_tol = -1.0) {
  for (double v : f.values) {
    if (!std::isfinite(v)) throw Error("to_spectral: non-finite input value");
  }
  SpectralField out = detail::forward_raw(f.grid, f.values);
  const double tol = mean_tol >= 0.0 ? mean_tol : 1e-12 * detail::max_abs(f.values);
  const double mean = std::abs(out.at(0, 0));
  if (mean > 0.0 && mean >= tol) {
    throw NonZeroMean("to_spectral: spatial mean " + std::to_string(mean) +
                      " exceeds tolerance; initial data must be mean-zero");
  }
  out.at(0, 0) = 0.0;
  return out;
}

/// Inverse transform. The imaginary residue must stay below 1e-12 ||f||_2.
inline PhysicalField to_physical(const SpectralField& f) {
  const std::vector<Complex> raw = detail::inverse_raw(f);
  const double tol = 1e-12 * spectral_l2(f);
  PhysicalField out(f.grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.values[i] = raw[i].real();
    worst = std::max(worst, std::abs(raw[i].imag()));
  }
  if (worst > tol) {
    throw BrokenSymmetry("to_physical: imaginary residue " + std::to_string(worst) +
                         " exceeds tolerance; coefficients are not Hermitian");
  }
  return out;
}

/// Two real fields from one complex inverse transform: ifft(a + i b).
inline std::pair<PhysicalField, PhysicalField> to_physical_pair(const SpectralField& a,
                                                                const SpectralField& b) {
  SpectralField packed(a.grid);
  for (std::size_t i = 0; i < packed.coeffs.size(); ++i) {
    packed.coeffs[i] = a.coeffs[i] + Complex(0.0, 1.0) * b.coeffs[i];
  }
  const std::vector<Complex> raw = detail::inverse_raw(packed);
  PhysicalField ra(a.grid), rb(a.grid);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    ra.values[i] = raw[i].real();
    rb.values[i] = raw[i].imag();
  }
  return {std::move(ra), std::move(rb)};
}

/// Applies coeff(k) *= m(k1, k2) for every mode.
template <typename Multiplier>
SpectralField apply_multiplier(SpectralField f, Multiplier&& m) {
  f.grid.for_each_mode([&](std::size_t i, int k1, int k2) { f.coeffs[i] *= m(k1, k2); });
  return f;
}

/// Lambda^s, the multiplier |k|^s; the zero mode is sent to 0.
inline SpectralField fractional_laplacian(SpectralField f, double s) {
  if (!(s >= -2.0 && s <= 2.0)) {
    throw Error("fractional_laplacian: exponent must lie in [-2, 2]");
  }
  if (s == 0.0) {
    f.at(0, 0) = 0.0;
    return f;
  }
  return apply_multiplier(std::move(f), [s](int k1, int k2) {
    const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
    return k2sum == 0.0 ? 0.0 : std::pow(k2sum, 0.5 * s);
  });
}

/// Spectral partial derivative along axis 0 (x1) or 1 (x2).
inline SpectralField derivative(SpectralField f, int axis) {
  return apply_multiplier(std::move(f), [axis](int k1, int k2) {
    return Complex(0.0, static_cast<double>(axis == 0 ? k1 : k2));
  });
}

/// u = Lambda^{alpha-1} R^perp theta, i.e. u(k) = i |k|^{alpha-2} (-k2, k1) theta(k).
inline VelocityField velocity(const SpectralField& theta, double alpha) {
  VelocityField u(theta.grid);
  const double e = 0.5 * (alpha - 2.0);
  theta.grid.for_each_mode([&](std::size_t i, int k1, int k2) {
    const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
    if (k2sum == 0.0) return;
    const double w = std::pow(k2sum, e);
    const Complex c = theta.coeffs[i] * Complex(0.0, w);
    u.u1.coeffs[i] = -static_cast<double>(k2) * c;
    u.u2.coeffs[i] = static_cast<double>(k1) * c;
  });
  return u;
}

/// R^perp theta = Lambda^{-1} (-d2 theta, d1 theta).
inline VelocityField riesz_perp(const SpectralField& theta) { return velocity(theta, 1.0); }

/// Zeroes every mode with max(|k1|, |k2|) above the 2/3-rule cutoff.
inline SpectralField dealias(SpectralField f) {
  const Grid2D& g = f.grid;
  g.for_each_mode([&](std::size_t i, int k1, int k2) {
    if (!g.inside_cutoff(k1, k2)) f.coeffs[i] = 0.0;
  });
  return f;
}

/// Dealiased pseudo-spectral u . grad(theta). The mean mode is exactly zero.
inline SpectralField advect(const VelocityField& u, const SpectralField& theta) {
  const Grid2D& g = theta.grid;
  if (!(u.grid() == g)) throw Error("advect: velocity and scalar grids differ");
  auto [u1, u2] = to_physical_pair(u.u1, u.u2);
  auto [t1, t2] = to_physical_pair(derivative(theta, 0), derivative(theta, 1));
  std::vector<double> prod(g.size());
  for (std::size_t i = 0; i < prod.size(); ++i) {
    prod[i] = u1.values[i] * t1.values[i] + u2.values[i] * t2.values[i];
  }
  SpectralField out = dealias(detail::forward_raw(g, prod));
  out.at(0, 0) = 0.0;
  return out;
}

/// Rectangle-rule L^p norm over [0, 2pi)^2; p = kInf gives the grid maximum.
inline double lp_norm(std::span<const double> values, const Grid2D& g, double p) {
  if (!(p >= 1.0)) throw Error("lp_norm: p must be >= 1");
  if (std::isinf(p)) return detail::max_abs(values);
  const double m = detail::max_abs(values);
  if (m == 0.0) return 0.0;
  // Scaled by the maximum so large p does not overflow.
  double s = 0.0;
  if (p == 2.0) {
    for (double v : values) s += (v / m) * (v / m);
  } else {
    for (double v : values) s += std::pow(std::abs(v) / m, p);
  }
  return m * std::pow(s * g.cell_area(), 1.0 / p);
}

inline double lp_norm(const PhysicalField& f, double p) { return lp_norm(f.values, f.grid, p); }

/// L^p norm of the pointwise Euclidean magnitude of a vector field.
inline double lp_norm(const PhysicalField& a, const PhysicalField& b, double p) {
  std::vector<double> mag(a.values.size());
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::hypot(a.values[i], b.values[i]);
  return lp_norm(mag, a.grid, p);
}

/// ||Lambda^s f||_2 by Parseval.
inline double sobolev_seminorm(const SpectralField& f, double s) {
  double acc = 0.0;
  f.grid.for_each_mode([&](std::size_t i, int k1, int k2) {
    const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
    if (k2sum > 0.0) acc += std::pow(k2sum, s) * std::norm(f.coeffs[i]);
  });
  return kTwoPi * std::sqrt(acc);
}

/// Transfers coefficients to grid m, dropping modes the target cannot hold.
/// Modes on either Nyquist line are not carried over.
inline SpectralField resample(const SpectralField& f, int m) {
  const Grid2D target(m);
  SpectralField out(target);
  const int half = std::min(f.grid.n(), m) / 2;
  f.grid.for_each_mode([&](std::size_t i, int k1, int k2) {
    if (std::abs(k1) < half && std::abs(k2) < half) out.at(k1, k2) = f.coeffs[i];
  });
  return out;
}

/// The field x -> f(factor x) on a grid factor times finer: c'(factor k) = c(k).
inline SpectralField dilate(const SpectralField& f, int factor) {
  const Grid2D target(f.grid.n() * factor);
  SpectralField out(target);
  const int half = f.grid.n() / 2;
  f.grid.for_each_mode([&](std::size_t i, int k1, int k2) {
    if (std::abs(k1) < half && std::abs(k2) < half) out.at(factor * k1, factor * k2) = f.coeffs[i];
  });
  return out;
}

/// Compares f on grid n with g on grid factor*n, interpreting g(x) = f(factor x).
inline double dilation_discrepancy(const SpectralField& f, const SpectralField& g, int factor) {
  return relative_l2_difference(dilate(f, factor), g);
}

}  // namespace mqg
