#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mqg/error.hpp"
#include "mqg/grid.hpp"
#include "mqg/spectral.hpp"

namespace mqg {

enum class FilterProfile { smooth, sharp };

inline const char* to_string(FilterProfile p) {
  return p == FilterProfile::sharp ? "sharp" : "smooth";
}

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, built from e^{-1/t}.
inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

/// Radial low-pass profile: 1 on [0, 1], 0 on [2, inf).
inline double radial_lowpass(double r) { return smoothstep(2.0 - r); }

/// Annular Fourier filters phi_j and the partial sums S_j = sum_{k<j} Delta_k.
///
/// Sharp shells are {2^{j-1} < |k| <= 2^j}; they are disjoint and sum to one
/// exactly. Smooth shells are chi(|k|/2^j) - chi(|k|/2^{j-1}) with support in
/// 2^{j-1} < |k| < 2^{j+1}.
class DyadicFilterBank {
 public:
  DyadicFilterBank(Grid2D grid, FilterProfile profile)
      : DyadicFilterBank(grid, profile, 0, default_j_max(grid)) {}

  DyadicFilterBank(Grid2D grid, FilterProfile profile, int j_min, int j_max)
      : grid_(grid), profile_(profile), j_min_(j_min), j_max_(j_max) {
    if (j_max < j_min) throw Error("DyadicFilterBank: empty shell range");
    weights_.reserve(j_max - j_min + 1);
    for (int j = j_min; j <= j_max; ++j) {
      std::vector<double> w(grid.size());
      grid.for_each_mode([&](std::size_t i, int k1, int k2) { w[i] = weight(j, k1, k2); });
      weights_.push_back(std::move(w));
    }
  }

  /// ceil(log2(cutoff)) + 1.
  static int default_j_max(const Grid2D& g) {
    int m = 0;
    while ((1 << m) < g.dealias_cutoff()) ++m;
    return m + 1;
  }

  const Grid2D& grid() const noexcept { return grid_; }
  FilterProfile profile() const noexcept { return profile_; }
  int j_min() const noexcept { return j_min_; }
  int j_max() const noexcept { return j_max_; }

  /// phi_j evaluated at integer wavevector k, independent of the stored range.
  double weight(int j, int k1, int k2) const {
    const long long r2 = static_cast<long long>(k1) * k1 + static_cast<long long>(k2) * k2;
    if (r2 == 0) return 0.0;
    if (profile_ == FilterProfile::sharp) {
      // 4^{j-1} < |k|^2 <= 4^j, compared in exact arithmetic where possible.
      const double hi = std::ldexp(1.0, 2 * j);
      const double lo = std::ldexp(1.0, 2 * (j - 1));
      const double r2d = static_cast<double>(r2);
      return (r2d > lo && r2d <= hi) ? 1.0 : 0.0;
    }
    const double r = std::sqrt(static_cast<double>(r2));
    return radial_lowpass(r / std::ldexp(1.0, j)) - radial_lowpass(r / std::ldexp(1.0, j - 1));
  }

  /// Delta_j f.
  SpectralField block(const SpectralField& f, int j) const {
    check_block_index(j);
    SpectralField out = f;
    const auto& w = weights_[j - j_min_];
    for (std::size_t i = 0; i < w.size(); ++i) out.coeffs[i] *= w[i];
    return out;
  }

  /// S_j f = sum_{j_min <= k < j} Delta_k f; j may range up to j_max + 1.
  SpectralField low_pass(const SpectralField& f, int j) const {
    if (j < j_min_ || j > j_max_ + 1) {
      throw JOutOfRange("low_pass: j = " + std::to_string(j) + " outside [" +
                        std::to_string(j_min_) + ", " + std::to_string(j_max_ + 1) + "]");
    }
    return low_pass_clamped(f, j);
  }

  /// As low_pass, but indices below the range give zero. Used for S_{k-1}.
  SpectralField low_pass_clamped(const SpectralField& f, int j) const {
    SpectralField out(f.grid);
    const int top = std::min(j, j_max_ + 1);
    for (int k = j_min_; k < top; ++k) {
      const auto& w = weights_[k - j_min_];
      for (std::size_t i = 0; i < w.size(); ++i) out.coeffs[i] += w[i] * f.coeffs[i];
    }
    return out;
  }

  VelocityField block(const VelocityField& u, int j) const {
    return VelocityField(block(u.u1, j), block(u.u2, j));
  }
  VelocityField low_pass_clamped(const VelocityField& u, int j) const {
    return VelocityField(low_pass_clamped(u.u1, j), low_pass_clamped(u.u2, j));
  }

  bool contains(int j) const noexcept { return j >= j_min_ && j <= j_max_; }

  void check_block_index(int j) const {
    if (!contains(j)) {
      throw JOutOfRange("dyadic block j = " + std::to_string(j) + " outside [" +
                        std::to_string(j_min_) + ", " + std::to_string(j_max_) + "]");
    }
  }

 private:
  Grid2D grid_;
  FilterProfile profile_;
  int j_min_;
  int j_max_;
  std::vector<std::vector<double>> weights_;
};

struct BesovIndex {
  double s;
  double p;
  double q;

  BesovIndex(double s_, double p_, double q_) : s(s_), p(p_), q(q_) {
    if (!(p >= 1.0) || !(q >= 1.0)) throw Error("BesovIndex: p and q must be >= 1");
  }
};

/// ||Delta_j f||_p for every shell j and every requested p: table[j - j_min][ip].
inline std::vector<std::vector<double>> block_norms(const DyadicFilterBank& bank,
                                                    const SpectralField& f,
                                                    const std::vector<double>& ps) {
  std::vector<std::vector<double>> table;
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    const PhysicalField b = to_physical(bank.block(f, j));
    std::vector<double> row;
    row.reserve(ps.size());
    for (double p : ps) row.push_back(lp_norm(b, p));
    table.push_back(std::move(row));
  }
  return table;
}

/// Combines per-shell L^p norms into the homogeneous Besov norm with weight 2^{js}.
inline double besov_from_blocks(const std::vector<double>& norms, int j_min, double s, double q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const double v = std::exp2(s * (j_min + static_cast<int>(i))) * norms[i];
    if (std::isinf(q)) {
      acc = std::max(acc, v);
    } else {
      acc += std::pow(v, q);
    }
  }
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

inline double besov_norm(const DyadicFilterBank& bank, const SpectralField& f,
                         const BesovIndex& idx) {
  const auto table = block_norms(bank, f, {idx.p});
  std::vector<double> norms;
  for (const auto& row : table) norms.push_back(row[0]);
  return besov_from_blocks(norms, bank.j_min(), idx.s, idx.q);
}

/// Operational C^delta norm: ||f||_inf + sup_j 2^{j delta} ||Delta_j f||_inf.
inline double holder_norm(const DyadicFilterBank& bank, const SpectralField& f, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error("holder_norm: delta must lie in (0, 1)");
  return lp_norm(to_physical(f), kInf) + besov_norm(bank, f, BesovIndex(delta, kInf, kInf));
}

/// The three paraproduct pieces of Delta_j (u . grad theta).
struct BonyTerms {
  SpectralField low_high;   // sum_k Delta_j(S_{k-1}u . grad Delta_k theta)
  SpectralField high_low;   // sum_k Delta_j(Delta_k u . grad S_{k-1} theta)
  SpectralField high_high;  // sum over |k-l|<=1 of Delta_j(Delta_k u . grad Delta_l theta)
};

/// Shells whose products can reach Delta_j: k in [lo, hi] for the low-high and
/// high-low sums, max(k, l) >= high_high_min for the high-high pairs.
struct InteractionRange {
  int lo;
  int hi;
  int high_high_min;
};

/// Sharp shells give |j - k| <= 2 and max(k, l) >= j - 1. The smooth shells
/// overlap over a factor 4 in |xi|, so S_{k-1}u . Delta_k theta reaches down to
/// the origin and every k >= j - 2 contributes.
inline InteractionRange interaction_range(const DyadicFilterBank& bank, int j) {
  if (bank.profile() == FilterProfile::sharp) {
    return {std::max(bank.j_min(), j - 2), std::min(bank.j_max(), j + 2), j - 1};
  }
  return {std::max(bank.j_min(), j - 2), bank.j_max(), j - 2};
}

/// Paraproduct splitting of Delta_j (u . grad theta); the three terms add up
/// to Delta_j(u . grad theta) for either profile.
inline BonyTerms bony_terms(const DyadicFilterBank& bank, const VelocityField& u,
                            const SpectralField& theta, int j) {
  bank.check_block_index(j);
  const Grid2D& g = theta.grid;
  const InteractionRange r = interaction_range(bank, j);
  SpectralField low_high(g), high_low(g), high_high(g);
  for (int k = r.lo; k <= r.hi; ++k) {
    low_high += advect(bank.low_pass_clamped(u, k - 1), bank.block(theta, k));
    high_low += advect(bank.block(u, k), bank.low_pass_clamped(theta, k - 1));
  }
  for (int k = bank.j_min(); k <= bank.j_max(); ++k) {
    const VelocityField uk = bank.block(u, k);
    for (int l = std::max(bank.j_min(), k - 1); l <= std::min(bank.j_max(), k + 1); ++l) {
      if (std::max(k, l) < r.high_high_min) continue;
      high_high += advect(uk, bank.block(theta, l));
    }
  }
  return {bank.block(low_high, j), bank.block(high_low, j), bank.block(high_high, j)};
}

/// [Delta_j, S_{k-1}u . grad] Delta_k theta.
inline SpectralField commutator_term(const DyadicFilterBank& bank, const VelocityField& u,
                                     const SpectralField& theta, int j, int k) {
  if (std::abs(j - k) > 2) {
    throw BadShellPair("commutator_term: |j - k| = " + std::to_string(std::abs(j - k)) +
                       " exceeds 2");
  }
  bank.check_block_index(j);
  bank.check_block_index(k);
  const VelocityField low = bank.low_pass_clamped(u, k - 1);
  const SpectralField dk = bank.block(theta, k);
  return bank.block(advect(low, dk), j) - advect(low, bank.block(dk, j));
}

struct BernsteinValue {
  double lhs;
  double rhs_unit;
  double ratio;
};

/// Dissipation functional of one block against 2^{alpha j} ||Delta_j f||_p^p:
/// lhs = int |Delta_j f|^{p-2} Delta_j f Lambda^alpha Delta_j f.
inline BernsteinValue bernstein_functional(const DyadicFilterBank& bank, const SpectralField& f,
                                           int j, double p, double alpha) {
  if (!(p >= 2.0) || std::isinf(p)) throw Error("bernstein_functional: p must lie in [2, inf)");
  if (!(alpha > 0.0 && alpha < 2.0)) throw Error("bernstein_functional: alpha must lie in (0, 2)");
  const SpectralField b = bank.block(f, j);
  auto [g, lg] = to_physical_pair(b, fractional_laplacian(b, alpha));
  const double h2 = g.grid.cell_area();
  double lhs = 0.0;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const double v = g.values[i];
    const double w = p == 2.0 ? v : std::pow(std::abs(v), p - 2.0) * v;
    lhs += w * lg.values[i];
  }
  lhs *= h2;
  const double np = lp_norm(g, p);
  const double rhs = std::exp2(alpha * j) * std::pow(np, p);
  return {lhs, rhs, rhs > 0.0 ? lhs / rhs : 0.0};
}

/// ||grad f||_p with the pointwise Euclidean gradient magnitude.
inline double gradient_lp(const SpectralField& f, double p) {
  auto [a, b] = to_physical_pair(derivative(f, 0), derivative(f, 1));
  return lp_norm(a, b, p);
}

}  // namespace mqg
