#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "mqg/error.hpp"

namespace mqg {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Square n x n grid on the torus [0, 2pi)^2.
///
/// Wavevectors are the integer pairs with -n/2 < k_i <= n/2. Storage index a
/// maps to k = a for a <= n/2 and k = a - n otherwise, the usual FFT order.
class Grid2D {
 public:
  explicit Grid2D(int n) : n_(n), cutoff_(n / 3) {
    if (n < 8 || n % 2 != 0) {
      throw Error("Grid2D: n must be even and >= 8, got " + std::to_string(n));
    }
  }

  int n() const noexcept { return n_; }
  int dealias_cutoff() const noexcept { return cutoff_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  double spacing() const noexcept { return kTwoPi / n_; }
  double cell_area() const noexcept { return spacing() * spacing(); }

  int wavenumber(int a) const noexcept { return a <= n_ / 2 ? a : a - n_; }

  /// Storage slot for wavenumber k, for -n/2 < k <= n/2.
  int slot(int k) const noexcept { return k >= 0 ? k : k + n_; }

  std::size_t index(int k1, int k2) const noexcept {
    return static_cast<std::size_t>(slot(k1)) * n_ + slot(k2);
  }

  bool resolves(int k1, int k2) const noexcept {
    return k1 > -n_ / 2 && k1 <= n_ / 2 && k2 > -n_ / 2 && k2 <= n_ / 2;
  }

  bool inside_cutoff(int k1, int k2) const noexcept {
    return std::abs(k1) <= cutoff_ && std::abs(k2) <= cutoff_;
  }

  /// Calls fn(index, k1, k2) for every stored mode.
  template <typename Fn>
  void for_each_mode(Fn&& fn) const {
    for (int a = 0; a < n_; ++a) {
      const int k1 = wavenumber(a);
      const std::size_t row = static_cast<std::size_t>(a) * n_;
      for (int b = 0; b < n_; ++b) {
        fn(row + b, k1, wavenumber(b));
      }
    }
  }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  int n_;
  int cutoff_;
};

/// Real grid values, row-major; entry (i, j) sits at x = 2pi (i/n, j/n).
struct PhysicalField {
  Grid2D grid;
  std::vector<double> values;

  explicit PhysicalField(Grid2D g) : grid(g), values(g.size(), 0.0) {}
  PhysicalField(Grid2D g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) {
      throw Error("PhysicalField: value count does not match grid");
    }
  }

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n() + j]; }
  double at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * grid.n() + j];
  }

  /// Samples fn(x1, x2) at every grid point.
  template <typename Fn>
  static PhysicalField sample(Grid2D g, Fn&& fn) {
    PhysicalField f(g);
    const double h = g.spacing();
    for (int i = 0; i < g.n(); ++i) {
      for (int j = 0; j < g.n(); ++j) {
        f.at(i, j) = fn(h * i, h * j);
      }
    }
    return f;
  }
};

/// Fourier-series coefficients of a real field: f(x) = sum_k c(k) e^{ik.x}.
struct SpectralField {
  Grid2D grid;
  std::vector<Complex> coeffs;

  explicit SpectralField(Grid2D g) : grid(g), coeffs(g.size(), Complex{}) {}

  Complex& at(int k1, int k2) { return coeffs[grid.index(k1, k2)]; }
  const Complex& at(int k1, int k2) const { return coeffs[grid.index(k1, k2)]; }

  /// Sets c(k) and c(-k) = conj(c(k)) together.
  void set_pair(int k1, int k2, Complex c) {
    at(k1, k2) = c;
    at(-k1, -k2) = std::conj(c);
  }

  SpectralField& operator+=(const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
    return *this;
  }
  SpectralField& operator*=(double s) {
    for (auto& c : coeffs) c *= s;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
};

/// Two spectral components of a planar velocity.
struct VelocityField {
  SpectralField u1;
  SpectralField u2;

  explicit VelocityField(Grid2D g) : u1(g), u2(g) {}
  VelocityField(SpectralField a, SpectralField b) : u1(std::move(a)), u2(std::move(b)) {}

  const Grid2D& grid() const noexcept { return u1.grid; }
};

/// Sum of |c(k)|^2 over all modes.
inline double spectral_energy(const SpectralField& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs) s += std::norm(c);
  return s;
}

/// L2 norm over the torus via Parseval: (2pi)^2 sum |c|^2.
inline double spectral_l2(const SpectralField& f) {
  return kTwoPi * std::sqrt(spectral_energy(f));
}

inline double relative_l2_difference(const SpectralField& a, const SpectralField& b) {
  const double denom = spectral_l2(b);
  const double diff = spectral_l2(a - b);
  return denom > 0.0 ? diff / denom : diff;
}

}  // namespace mqg
