#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mqg/diagnostics.hpp"
#include "mqg/initial_data.hpp"
#include "mqg/integrator.hpp"
#include "mqg/littlewood_paley.hpp"
#include "mqg/spectral.hpp"

namespace mqg {

// ---------------------------------------------------------------------------
// Regularity-gain arithmetic

/// delta_1 = (1 - 2/p) delta.
inline double interpolated_exponent(double delta, double p) { return (1.0 - 2.0 / p) * delta; }

/// delta' = delta + min(delta, alpha) / 2.
inline double improved_exponent(double delta, double alpha) {
  return delta + 0.5 * std::min(delta, alpha);
}

enum class BootstrapCase { doubling, alpha_shift };

/// doubling when delta_1 < alpha, alpha_shift otherwise.
inline BootstrapCase bootstrap_case(double delta1, double alpha) {
  return delta1 < alpha ? BootstrapCase::doubling : BootstrapCase::alpha_shift;
}

inline const char* to_string(BootstrapCase c) {
  return c == BootstrapCase::doubling ? "case1(delta1<alpha)" : "case2(delta1>=alpha)";
}

/// Besov exponent reached after one bootstrap pass: 2 delta_1 or delta_1 + alpha.
inline double target_exponent(double delta1, double alpha) {
  return bootstrap_case(delta1, alpha) == BootstrapCase::doubling ? 2.0 * delta1 : delta1 + alpha;
}

// ---------------------------------------------------------------------------
// Energy balance

struct EnergyReport {
  double initial_energy = 0.0;  // ||theta_0||_2^2
  double final_energy = 0.0;
  double dissipated = 0.0;      // 2 kappa int ||Lambda^{alpha/2} theta||_2^2 dt
  double residual = 0.0;
  double relative_residual = 0.0;
};

/// ||theta_T||^2 + 2 kappa int_0^T ||Lambda^{alpha/2} theta||^2 dt - ||theta_0||^2,
/// trapezoidal in time over the records.
inline EnergyReport energy_report(const std::vector<DiagnosticRecord>& records, double kappa) {
  if (records.size() < 2) throw Error("energy_report: need at least two records");
  EnergyReport r;
  r.initial_energy = records.front().l2 * records.front().l2;
  r.final_energy = records.back().l2 * records.back().l2;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double a = records[i - 1].h_alpha_half;
    const double b = records[i].h_alpha_half;
    r.dissipated += 0.5 * (a * a + b * b) * (records[i].t - records[i - 1].t);
  }
  r.dissipated *= 2.0 * kappa;
  r.residual = r.final_energy + r.dissipated - r.initial_energy;
  r.relative_residual = r.initial_energy > 0.0 ? std::abs(r.residual) / r.initial_energy
                                               : std::abs(r.residual);
  return r;
}

// ---------------------------------------------------------------------------
// L^inf decay

struct LinfDecayReport {
  std::vector<double> t;
  std::vector<double> ratio;  // ||theta_t||_inf (kappa t)^{1/alpha} / ||theta_0||_2
  double sup_ratio = 0.0;
  double t_at_sup = 0.0;
  double worst_increase = 0.0;  // max relative growth of ||theta||_inf between records
  bool monotone = true;
  double tail_slope = 0.0;  // least-squares slope of the ratio on [t_end/2, t_end]
  bool bounded = true;
  bool passed = true;
};

inline LinfDecayReport linf_decay_check(const std::vector<DiagnosticRecord>& records, double kappa,
                                        double alpha, double t_small = 0.0,
                                        double step_tol = 1e-8) {
  LinfDecayReport rep;
  if (records.empty()) return rep;
  const double l2_0 = records.front().l2;
  for (const auto& rec : records) {
    const double r = l2_0 > 0.0 ? rec.linf * std::pow(kappa * rec.t, 1.0 / alpha) / l2_0 : 0.0;
    rep.t.push_back(rec.t);
    rep.ratio.push_back(r);
    if (rec.t >= t_small && r > rep.sup_ratio) {
      rep.sup_ratio = r;
      rep.t_at_sup = rec.t;
    }
  }
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double prev = records[i - 1].linf;
    if (prev <= 0.0) continue;
    const double growth = (records[i].linf - prev) / prev;
    rep.worst_increase = std::max(rep.worst_increase, growth);
    if (growth > step_tol) rep.monotone = false;
  }
  const double t_end = records.back().t;
  double st = 0.0, sr = 0.0, stt = 0.0, str = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    if (rep.t[i] < 0.5 * t_end) continue;
    st += rep.t[i];
    sr += rep.ratio[i];
    stt += rep.t[i] * rep.t[i];
    str += rep.t[i] * rep.ratio[i];
    ++count;
  }
  const double den = count * stt - st * st;
  rep.tail_slope = (count >= 2 && den > 0.0) ? (count * str - st * sr) / den : 0.0;
  // Growth over the tail window must not exceed round-off relative to the peak.
  rep.bounded = std::isfinite(rep.sup_ratio) &&
                rep.tail_slope * 0.5 * t_end <= 1e-6 * std::max(rep.sup_ratio, 1e-300);
  rep.passed = rep.monotone && rep.bounded;
  return rep;
}

// ---------------------------------------------------------------------------
// Velocity Hoelder bound

struct UHolderRatio {
  double u1 = 0.0;
  double u2 = 0.0;
  double max() const { return std::max(u1, u2); }
};

/// C^{1-alpha} norm of each velocity component divided by ||theta||_inf.
inline UHolderRatio u_holder_check(const DyadicFilterBank& bank, const SpectralField& theta,
                                   double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("u_holder_check: alpha must lie in (0, 1)");
  const double linf = lp_norm(to_physical(theta), kInf);
  if (linf == 0.0) throw DegenerateField("u_holder_check: theta vanishes identically");
  const VelocityField u = velocity(theta, alpha);
  return {holder_norm(bank, u.u1, 1.0 - alpha) / linf, holder_norm(bank, u.u2, 1.0 - alpha) / linf};
}

inline UHolderRatio u_holder_check(const DyadicFilterBank& bank, const SimulationState& s) {
  return u_holder_check(bank, s.theta, s.config.alpha);
}

struct UHolderRefinement {
  double coarse = 0.0;
  double fine = 0.0;
  double relative_change = 0.0;
  bool passed = false;
};

/// Compares the ratio for the same solution computed on grids n and 2n.
inline UHolderRefinement u_holder_refinement(const SpectralField& coarse,
                                             const SpectralField& fine, double alpha,
                                             FilterProfile profile, double tolerance = 0.2) {
  UHolderRefinement r;
  r.coarse = u_holder_check(DyadicFilterBank(coarse.grid, profile), coarse, alpha).max();
  r.fine = u_holder_check(DyadicFilterBank(fine.grid, profile), fine, alpha).max();
  r.relative_change = std::abs(r.fine - r.coarse) / r.coarse;
  r.passed = std::isfinite(r.coarse) && std::isfinite(r.fine) && r.relative_change <= tolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Scaling symmetry theta(x, t) -> theta(2x, 2^alpha t)

struct ScalingReport {
  double discrepancy = 0.0;
  long steps_coarse = 0;
  long steps_fine = 0;
};

/// Run A: theta0 on grid n to time T. Run B: theta0(2x) on grid 2n to T / 2^alpha.
/// Returns the relative L2 distance between B and the rescaled A.
inline ScalingReport scaling_invariance_check(const SpectralField& theta0, double alpha,
                                              double kappa, double t_end, DtPolicy policy) {
  SolverConfig a;
  a.alpha = alpha;
  a.kappa = kappa;
  a.n = theta0.grid.n();
  a.t_end = t_end;
  a.dt_policy = policy;
  a.diag_every = t_end;
  a.snapshot_every = t_end;
  const double factor = std::exp2(alpha);
  SolverConfig b = a;
  b.n = 2 * a.n;
  b.t_end = t_end / factor;
  b.diag_every = b.t_end;
  b.snapshot_every = b.t_end;
  if (auto* f = std::get_if<FixedStep>(&b.dt_policy)) f->dt /= factor;

  const SimulationState ra = run(a, theta0);
  const SimulationState rb = run(b, dilate(theta0, 2));
  ScalingReport rep;
  rep.steps_coarse = ra.steps;
  rep.steps_fine = rb.steps;
  const double ref = spectral_l2(rb.theta);
  const double diff = spectral_l2(dilate(ra.theta, 2) - rb.theta);
  rep.discrepancy = ref > 0.0 ? diff / ref : diff;
  return rep;
}

// ---------------------------------------------------------------------------
// Regularity bootstrap

struct BootstrapParams {
  double delta = 0.2;
  double alpha = 0.5;
  double kappa = 1.0;
  double p = 20.0;
  double t_end = 5.0;
  int n = 128;  // the refinement pair is (n, 2n)
  std::uint64_t seed = 1;
  double amp = 0.25;
  int records = 20;
  FilterProfile profile = FilterProfile::smooth;
  double cfl_safety = 0.5;
  double growth_limit = 1.25;       // allowed fine/coarse growth for t >= t0'
  double divergence_factor = 0.5;   // t = 0 growth must exceed 2^{factor (target - delta1)}
  double t0_fraction = 0.1;         // t0' = fraction * t_end
};

struct BootstrapReport {
  double delta_in = 0.0;
  double alpha = 0.0;
  double p = 0.0;
  double delta1 = 0.0;
  double predicted_gain = 0.0;  // min(delta, alpha) / 2
  double delta_prime = 0.0;
  BootstrapCase regime = BootstrapCase::doubling;
  double target = 0.0;
  std::vector<double> exponents;  // delta1, 2 delta1, delta1 + alpha
  std::vector<double> times;
  // series[grid][exponent][time]; grid 0 is n, grid 1 is 2n.
  std::vector<std::vector<double>> series_coarse, series_fine;
  std::vector<double> target_growth;  // fine / coarse at each time
  double initial_growth = 0.0;
  double late_growth = 0.0;           // max over t >= t0'
  double divergence_threshold = 0.0;
  double measured_gain = 0.0;         // log2(initial_growth / late_growth)
  bool uniform_late = false;
  bool diverges_initially = false;
  bool passed = false;
  std::string verdict;
};

inline BootstrapReport bootstrap_experiment(const BootstrapParams& prm) {
  BootstrapReport rep;
  rep.delta_in = prm.delta;
  rep.alpha = prm.alpha;
  rep.p = prm.p;
  rep.delta1 = interpolated_exponent(prm.delta, prm.p);
  rep.predicted_gain = 0.5 * std::min(prm.delta, prm.alpha);
  rep.delta_prime = improved_exponent(prm.delta, prm.alpha);
  rep.regime = bootstrap_case(rep.delta1, prm.alpha);
  rep.target = target_exponent(rep.delta1, prm.alpha);
  rep.exponents = {rep.delta1, 2.0 * rep.delta1, rep.delta1 + prm.alpha};
  const std::size_t target_index = rep.regime == BootstrapCase::doubling ? 1 : 2;

  DiagnosticOptions opt;
  opt.blocks = false;
  opt.u_holder = false;
  for (double s : rep.exponents) opt.besov.emplace_back(s, prm.p);

  auto simulate = [&](int n) {
    SolverConfig c;
    c.alpha = prm.alpha;
    c.kappa = prm.kappa;
    c.n = n;
    c.t_end = prm.t_end;
    c.dt_policy = CflStep{prm.cfl_safety};
    c.diag_every = prm.t_end / prm.records;
    c.snapshot_every = prm.t_end;
    const Grid2D g(n);
    const DyadicFilterBank bank(g, prm.profile);
    DiagnosticCollector col(bank, opt);
    run(c, spectral_decay(g, prm.delta, prm.seed, prm.amp), {&col});
    std::vector<std::vector<double>> series(rep.exponents.size());
    for (const auto& r : col.records) {
      for (std::size_t e = 0; e < rep.exponents.size(); ++e) series[e].push_back(r.besov[e].value);
    }
    if (n == prm.n) {
      for (const auto& r : col.records) rep.times.push_back(r.t);
    }
    return series;
  };
  rep.series_coarse = simulate(prm.n);
  rep.series_fine = simulate(2 * prm.n);

  const auto& c = rep.series_coarse[target_index];
  const auto& f = rep.series_fine[target_index];
  const double t0 = prm.t0_fraction * prm.t_end;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double g = c[i] > 0.0 ? f[i] / c[i] : 1.0;
    rep.target_growth.push_back(g);
    if (rep.times[i] >= t0 - 1e-12 * prm.t_end) rep.late_growth = std::max(rep.late_growth, g);
  }
  rep.initial_growth = rep.target_growth.front();
  rep.divergence_threshold = std::exp2(prm.divergence_factor * (rep.target - rep.delta1));
  rep.uniform_late = rep.late_growth < prm.growth_limit;
  rep.diverges_initially = rep.initial_growth > rep.divergence_threshold;
  rep.measured_gain = std::log2(rep.initial_growth / rep.late_growth);
  rep.passed = rep.uniform_late && rep.diverges_initially;
  rep.verdict = rep.passed ? "regularity gain observed"
                           : (!rep.diverges_initially ? "initial data not rough enough at this resolution"
                                                      : "target norm not grid-uniform after t0'");
  return rep;
}

// ---------------------------------------------------------------------------
// Paraproduct bookkeeping

namespace detail {

// Grid large enough that (a) products of two cutoff-limited fields are alias
// free and (b) the rectangle rule integrates |g|^{p-2} g (v . grad g) exactly
// for even integer p.
inline int exact_quadrature_grid(int cutoff, double p) {
  const double need = std::max((p + 1.0) * cutoff, 4.0 * cutoff) + 2.0;
  const int m = static_cast<int>(std::ceil(need / 16.0)) * 16;
  return m;
}

// u . grad theta on the current grid without truncation; alias free only when
// the grid holds twice the input bandwidth.
inline SpectralField advect_untruncated(const VelocityField& u, const SpectralField& theta) {
  const Grid2D& g = theta.grid;
  auto [u1, u2] = to_physical_pair(u.u1, u.u2);
  auto [t1, t2] = to_physical_pair(derivative(theta, 0), derivative(theta, 1));
  std::vector<double> prod(g.size());
  for (std::size_t i = 0; i < prod.size(); ++i) {
    prod[i] = u1.values[i] * t1.values[i] + u2.values[i] * t2.values[i];
  }
  SpectralField out = forward_raw(g, prod);
  out.at(0, 0) = 0.0;
  return out;
}

inline double integrate_against(const std::vector<double>& w, const SpectralField& f) {
  const PhysicalField phys = to_physical(f);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * phys.values[i];
  return s * f.grid.cell_area();
}

inline VelocityField resample(const VelocityField& u, int m) {
  return VelocityField(mqg::resample(u.u1, m), mqg::resample(u.u2, m));
}

inline VelocityField difference(const VelocityField& a, const VelocityField& b) {
  return VelocityField(a.u1 - b.u1, a.u2 - b.u2);
}

// max over the grid of the Frobenius norm of grad u.
inline double gradient_linf(const VelocityField& u) {
  auto [a, b] = to_physical_pair(derivative(u.u1, 0), derivative(u.u1, 1));
  auto [c, d] = to_physical_pair(derivative(u.u2, 0), derivative(u.u2, 1));
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double v = a.values[i] * a.values[i] + b.values[i] * b.values[i] +
                     c.values[i] * c.values[i] + d.values[i] * d.values[i];
    m = std::max(m, v);
  }
  return std::sqrt(m);
}

}  // namespace detail

struct ShellIdentity {
  int j = 0;
  double defect = 0.0;  // ||T1+T2+T3 - Delta_j(u.grad theta)||_2 / ||Delta_j(u.grad theta)||_2
  double I1 = 0.0, I2 = 0.0, I3 = 0.0;
  double I11 = 0.0, I12 = 0.0, I13 = 0.0;
  double i12_scale = 0.0;     // p int |g|^{p-1} |S_j u . grad g|
  double split_defect = 0.0;  // |I1 - (I11 + I12 + I13)| / scale
  double scale = 0.0;         // max(|I1|, |I11|, |I13|, i12_scale)
  double commutator_constant = 0.0;
};

struct ParaproductReport {
  double p = 0.0;
  int quadrature_grid = 0;
  std::vector<ShellIdentity> shells;
  double max_defect = 0.0;
  double max_i12_relative = 0.0;
  double max_split_defect = 0.0;
  double max_commutator_constant = 0.0;
};

/// Commutator size relative to the kernel bound 2^{k-j} ||grad S_{k-1}u||_inf ||Delta_k theta||_p.
inline double commutator_constant(const DyadicFilterBank& bank, const VelocityField& u,
                                  const SpectralField& theta, int j, double p) {
  double worst = 0.0;
  for (int k = std::max(bank.j_min(), j - 2); k <= std::min(bank.j_max(), j + 2); ++k) {
    const double grad = detail::gradient_linf(bank.low_pass_clamped(u, k - 1));
    const double dk = lp_norm(to_physical(bank.block(theta, k)), p);
    const double bound = std::exp2(k - j) * grad * dk;
    if (bound <= 0.0) continue;
    const double c = lp_norm(to_physical(commutator_term(bank, u, theta, j, k)), p);
    worst = std::max(worst, c / bound);
  }
  return worst;
}

/// For each shell j: the Bony reconstruction defect on the working grid, and the
/// integrals I1, I2, I3 and I11, I12, I13 of the L^p energy estimate evaluated
/// with untruncated products and exact quadrature on a refined grid.
inline ParaproductReport paraproduct_identity_suite(const DyadicFilterBank& bank,
                                                    const VelocityField& u,
                                                    const SpectralField& theta,
                                                    const std::vector<int>& shells,
                                                    double p = 4.0) {
  ParaproductReport rep;
  rep.p = p;
  const Grid2D& g = theta.grid;
  const int m = detail::exact_quadrature_grid(g.dealias_cutoff(), p);
  rep.quadrature_grid = m;
  const Grid2D fine(m);
  const DyadicFilterBank fb(fine, bank.profile(), bank.j_min(), bank.j_max());
  const VelocityField uf = detail::resample(u, m);
  const SpectralField thf = resample(theta, m);
  const SpectralField full = advect(u, theta);

  for (int j : shells) {
    ShellIdentity s;
    s.j = j;
    const BonyTerms t = bony_terms(bank, u, theta, j);
    const SpectralField direct = bank.block(full, j);
    const double ref = spectral_l2(direct);
    const double err = spectral_l2(t.low_high + t.high_low + t.high_high - direct);
    s.defect = ref > 0.0 ? err / ref : err;

    // Weight |Delta_j theta|^{p-2} Delta_j theta on the refined grid.
    const SpectralField gj = fb.block(thf, j);
    const PhysicalField gphys = to_physical(gj);
    std::vector<double> w(gphys.values.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double v = gphys.values[i];
      w[i] = p == 2.0 ? v : std::pow(std::abs(v), p - 2.0) * v;
    }

    SpectralField t1(fine), t2(fine), t3(fine), comm(fine), i13(fine);
    const VelocityField sj = fb.low_pass_clamped(uf, j);
    const InteractionRange r = interaction_range(fb, j);
    for (int k = r.lo; k <= r.hi; ++k) {
      const VelocityField low = fb.low_pass_clamped(uf, k - 1);
      const SpectralField dk = fb.block(thf, k);
      const SpectralField prod = detail::advect_untruncated(low, dk);
      t1 += prod;
      t2 += detail::advect_untruncated(fb.block(uf, k), fb.low_pass_clamped(thf, k - 1));
      const SpectralField djdk = fb.block(dk, j);
      comm += fb.block(prod, j) - detail::advect_untruncated(low, djdk);
      i13 += detail::advect_untruncated(detail::difference(low, sj), djdk);
    }
    for (int k = fb.j_min(); k <= fb.j_max(); ++k) {
      const VelocityField uk = fb.block(uf, k);
      for (int l = std::max(fb.j_min(), k - 1); l <= std::min(fb.j_max(), k + 1); ++l) {
        if (std::max(k, l) < r.high_high_min) continue;
        t3 += detail::advect_untruncated(uk, fb.block(thf, l));
      }
    }
    s.I1 = -p * detail::integrate_against(w, fb.block(t1, j));
    s.I2 = -p * detail::integrate_against(w, fb.block(t2, j));
    s.I3 = -p * detail::integrate_against(w, fb.block(t3, j));
    s.I11 = -p * detail::integrate_against(w, comm);
    s.I13 = -p * detail::integrate_against(w, i13);

    // I12 pointwise: the integrand is |g|^{p-2} g (S_j u . grad g).
    auto [s1, s2] = to_physical_pair(sj.u1, sj.u2);
    auto [g1, g2] = to_physical_pair(derivative(gj, 0), derivative(gj, 1));
    double i12 = 0.0, i12_abs = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double adv = s1.values[i] * g1.values[i] + s2.values[i] * g2.values[i];
      i12 += w[i] * adv;
      i12_abs += std::abs(w[i] * adv);
    }
    s.I12 = -p * i12 * fine.cell_area();
    s.i12_scale = p * i12_abs * fine.cell_area();
    s.scale = std::max({std::abs(s.I1), std::abs(s.I11), std::abs(s.I13), s.i12_scale});
    s.split_defect = s.scale > 0.0 ? std::abs(s.I1 - (s.I11 + s.I12 + s.I13)) / s.scale : 0.0;
    s.commutator_constant = commutator_constant(bank, u, theta, j, p);

    rep.max_defect = std::max(rep.max_defect, s.defect);
    rep.max_i12_relative =
        std::max(rep.max_i12_relative, s.i12_scale > 0.0 ? std::abs(s.I12) / s.i12_scale : 0.0);
    rep.max_split_defect = std::max(rep.max_split_defect, s.split_defect);
    rep.max_commutator_constant = std::max(rep.max_commutator_constant, s.commutator_constant);
    rep.shells.push_back(s);
  }
  return rep;
}

inline ParaproductReport paraproduct_identity_suite(const DyadicFilterBank& bank,
                                                    const SimulationState& state,
                                                    const std::vector<int>& shells,
                                                    double p = 4.0) {
  return paraproduct_identity_suite(bank, velocity(state.theta, state.config.alpha), state.theta,
                                    shells, p);
}

// ---------------------------------------------------------------------------
// Positivity of the block dissipation functional

struct LemmaRow {
  double p = 0.0;
  double alpha = 0.0;
  double min_ratio = 0.0;
  double median_ratio = 0.0;
  double lower_bound = 0.0;  // 2^{-alpha} when p = 2, else 0
  double empirical_c = 0.0;  // 1 / min_ratio
  long samples = 0;
  bool passed = false;
};

inline std::vector<LemmaRow> lemma_sweep(const std::vector<double>& p_list,
                                         const std::vector<double>& alpha_list, int trials,
                                         int n = 128, std::uint64_t seed = 2024,
                                         FilterProfile profile = FilterProfile::smooth) {
  for (double p : p_list) {
    if (!(p >= 2.0) || std::isinf(p)) throw Error("lemma_sweep: p must be finite and >= 2");
  }
  const Grid2D g(n);
  const DyadicFilterBank bank(g, profile);
  std::vector<std::vector<double>> ratios(p_list.size() * alpha_list.size());
  for (int trial = 0; trial < trials; ++trial) {
    const SpectralField f = random_field(g, seed + static_cast<std::uint64_t>(trial));
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
      for (std::size_t ia = 0; ia < alpha_list.size(); ++ia) {
        for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
          const BernsteinValue v = bernstein_functional(bank, f, j, p_list[ip], alpha_list[ia]);
          if (v.rhs_unit > 0.0) ratios[ip * alpha_list.size() + ia].push_back(v.ratio);
        }
      }
    }
  }
  std::vector<LemmaRow> rows;
  for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
    for (std::size_t ia = 0; ia < alpha_list.size(); ++ia) {
      auto& v = ratios[ip * alpha_list.size() + ia];
      LemmaRow row;
      row.p = p_list[ip];
      row.alpha = alpha_list[ia];
      row.samples = static_cast<long>(v.size());
      if (!v.empty()) {
        std::sort(v.begin(), v.end());
        row.min_ratio = v.front();
        row.median_ratio = v[v.size() / 2];
        row.empirical_c = 1.0 / row.min_ratio;
      }
      row.lower_bound = row.p == 2.0 ? std::exp2(-row.alpha) : 0.0;
      row.passed = !v.empty() && row.min_ratio > 0.0 &&
                   (row.p != 2.0 || row.min_ratio >= row.lower_bound - 1e-10);
      rows.push_back(row);
    }
  }
  return rows;
}

/// max_j ||grad Delta_j f||_p / (2^j ||Delta_j f||_p) over nonempty shells.
inline double bernstein_upper_constant(const DyadicFilterBank& bank, const SpectralField& f,
                                       double p) {
  double worst = 0.0;
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    const SpectralField b = bank.block(f, j);
    const double nb = lp_norm(to_physical(b), p);
    if (nb <= 0.0) continue;
    worst = std::max(worst, gradient_lp(b, p) / (std::exp2(j) * nb));
  }
  return worst;
}

}  // namespace mqg
