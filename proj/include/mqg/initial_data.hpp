#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "mqg/grid.hpp"

namespace mqg {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Phase in [0, 2pi) attached to the wavevector itself, so every grid size
// assigns the same phase to a shared mode.
inline double mode_phase(std::uint64_t seed, int k1, int k2) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(k1)));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k2)) << 32));
  return kTwoPi * static_cast<double>(h >> 11) * 0x1.0p-53;
}

// One representative of each +-k pair: k1 > 0, or k1 == 0 and k2 > 0.
inline bool canonical(int k1, int k2) { return k1 > 0 || (k1 == 0 && k2 > 0); }

}  // namespace detail

/// amp cos(k1 x1 + k2 x2).
inline SpectralField single_mode(const Grid2D& g, int k1, int k2, double amp) {
  SpectralField f(g);
  if (k1 == 0 && k2 == 0) return f;
  f.set_pair(k1, k2, 0.5 * amp);
  return f;
}

inline SpectralField two_mode(const Grid2D& g, int k1, int k2, double a1, int l1, int l2,
                              double a2) {
  SpectralField f = single_mode(g, k1, k2, a1);
  f += single_mode(g, l1, l2, a2);
  return f;
}

/// |c(k)| = amp |k|^{-1-delta} with seeded phases on every mode inside the
/// dealiasing cutoff. Such data sits in the Besov class of order delta,
/// uniformly in the grid size, and no better.
inline SpectralField spectral_decay(const Grid2D& g, double delta, std::uint64_t seed,
                                    double amp = 1.0) {
  SpectralField f(g);
  const int c = g.dealias_cutoff();
  for (int k1 = 0; k1 <= c; ++k1) {
    for (int k2 = -c; k2 <= c; ++k2) {
      if (!detail::canonical(k1, k2)) continue;
      const double r = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
      const double mag = amp * std::pow(r, -1.0 - delta);
      f.set_pair(k1, k2, std::polar(mag, detail::mode_phase(seed, k1, k2)));
    }
  }
  return f;
}

/// Gaussian-enveloped random data: |c(k)| = amp exp(-(|k|/k0)^2), seeded phases.
inline SpectralField smooth_random(const Grid2D& g, std::uint64_t seed, double amp, double k0) {
  SpectralField f(g);
  const int c = g.dealias_cutoff();
  for (int k1 = 0; k1 <= c; ++k1) {
    for (int k2 = -c; k2 <= c; ++k2) {
      if (!detail::canonical(k1, k2)) continue;
      const double r = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
      const double mag = amp * std::exp(-(r / k0) * (r / k0));
      f.set_pair(k1, k2, std::polar(mag, detail::mode_phase(seed, k1, k2)));
    }
  }
  return f;
}

/// Complex Gaussian coefficients scaled by |k|^{-slope}, dealiased, Hermitian.
inline SpectralField random_field(const Grid2D& g, std::uint64_t seed, double slope = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SpectralField f(g);
  const int c = g.dealias_cutoff();
  for (int k1 = 0; k1 <= c; ++k1) {
    for (int k2 = -c; k2 <= c; ++k2) {
      if (!detail::canonical(k1, k2)) continue;
      const double r = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
      const double a = normal(rng);
      const double b = normal(rng);
      f.set_pair(k1, k2, std::pow(r, -slope) * Complex(a, b));
    }
  }
  return f;
}

}  // namespace mqg
