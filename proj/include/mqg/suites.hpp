#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mqg/diagnostics.hpp"
#include "mqg/initial_data.hpp"
#include "mqg/integrator.hpp"
#include "mqg/io.hpp"
#include "mqg/littlewood_paley.hpp"
#include "mqg/spectral.hpp"
#include "mqg/verification.hpp"

namespace mqg::suites {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Optional overrides read from a verify config; unset fields use the
/// per-check defaults below.
struct VerifyParams {
  std::optional<int> n;
  std::optional<double> alpha, kappa, t_end, delta, p, cfl_safety, amp;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
};

inline const std::set<std::string>& verify_config_keys() {
  static const std::set<std::string> keys{"n", "alpha", "kappa", "t_end", "delta", "p",
                                          "cfl_safety", "amp", "trials", "seed"};
  return keys;
}

inline VerifyParams parse_verify_params(const io::KeyValues& kv) {
  VerifyParams v;
  auto num = [&](const char* k, std::optional<double>& out) {
    if (kv.count(k)) out = io::parse_double(kv.at(k), k);
  };
  if (kv.count("n")) v.n = static_cast<int>(io::parse_int(kv.at("n"), "n"));
  if (kv.count("trials")) v.trials = static_cast<int>(io::parse_int(kv.at("trials"), "trials"));
  if (kv.count("seed")) v.seed = static_cast<std::uint64_t>(io::parse_int(kv.at("seed"), "seed"));
  num("alpha", v.alpha);
  num("kappa", v.kappa);
  num("t_end", v.t_end);
  num("delta", v.delta);
  num("p", v.p);
  num("cfl_safety", v.cfl_safety);
  num("amp", v.amp);
  return v;
}

namespace detail {

inline std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

inline std::string fix(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

inline CheckResult timed(std::string name, const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = std::move(name);
  try {
    auto [ok, detail] = body();
    r.passed = ok;
    r.detail = std::move(detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline double max_abs_diff(const PhysicalField& a, const PhysicalField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operators

/// Eigenfunction scaling, multiplier inverses, divergence-free velocity and
/// the single-mode Riesz values; worst relative error against 1e-12.
inline CheckResult operator_identities(int n = 128, double tol = 1e-12) {
  return detail::timed("operator identities", [=]() -> std::pair<bool, std::string> {
    const Grid2D g(n);
    double eig = 0.0, inv = 0.0, div = 0.0, riesz = 0.0;

    const int modes[][2] = {{1, 0}, {3, 4}, {5, 12}, {7, -24}, {0, 9}};
    for (const auto& k : modes) {
      const SpectralField f = single_mode(g, k[0], k[1], 1.0);
      const double r = std::hypot(k[0], k[1]);
      for (double s : {-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0}) {
        const SpectralField expect = std::pow(r, s) * f;
        eig = std::max(eig, relative_l2_difference(fractional_laplacian(f, s), expect));
      }
    }
    {
      // cos(3x1 + 4x2) under Lambda^{1/2} is sqrt(5) cos(3x1 + 4x2) pointwise.
      const PhysicalField got = to_physical(fractional_laplacian(single_mode(g, 3, 4, 1.0), 0.5));
      const PhysicalField want = PhysicalField::sample(
          g, [](double x, double y) { return std::sqrt(5.0) * std::cos(3 * x + 4 * y); });
      eig = std::max(eig, detail::max_abs_diff(got, want) / std::sqrt(5.0));
    }
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const SpectralField f = random_field(g, seed);
      for (double s : {0.5, 1.0, 1.5, 2.0}) {
        inv = std::max(inv, relative_l2_difference(fractional_laplacian(fractional_laplacian(f, s), -s), f));
      }
      for (double alpha : {0.3, 0.5, 1.0}) {
        const VelocityField u = velocity(f, alpha);
        double worst = 0.0, scale = 0.0;
        g.for_each_mode([&](std::size_t i, int k1, int k2) {
          const Complex d = static_cast<double>(k1) * u.u1.coeffs[i] + static_cast<double>(k2) * u.u2.coeffs[i];
          worst = std::max(worst, std::abs(d));
          scale = std::max(scale, std::hypot(k1, k2) * std::hypot(std::abs(u.u1.coeffs[i]), std::abs(u.u2.coeffs[i])));
        });
        div = std::max(div, worst / scale);
      }
    }
    {
      auto check = [&](const SpectralField& theta, double alpha, auto f1, auto f2) {
        const VelocityField u = velocity(theta, alpha);
        const PhysicalField a = to_physical(u.u1), b = to_physical(u.u2);
        riesz = std::max(riesz, detail::max_abs_diff(a, PhysicalField::sample(g, f1)));
        riesz = std::max(riesz, detail::max_abs_diff(b, PhysicalField::sample(g, f2)));
      };
      check(single_mode(g, 1, 0, 1.0), 1.0, [](double, double) { return 0.0; },
            [](double x, double) { return -std::sin(x); });
      check(single_mode(g, 0, 1, 1.0), 1.0, [](double, double y) { return std::sin(y); },
            [](double, double) { return 0.0; });
      check(single_mode(g, 2, 0, 1.0), 0.5, [](double, double) { return 0.0; },
            [](double x, double) { return -std::sqrt(0.5) * std::sin(2 * x); });
    }
    const double worst = std::max({eig, inv, div, riesz});
    return {worst <= tol, "n=" + std::to_string(n) + " eigen=" + detail::sci(eig) + " inverse=" +
                              detail::sci(inv) + " divfree=" + detail::sci(div) + " riesz=" +
                              detail::sci(riesz) + " (tol " + detail::sci(tol) + ")"};
  });
}

/// theta(t) = e^{-kappa |k|^alpha t} cos(k.x) on [0, 1] for every parameter combination.
inline CheckResult plane_waves(int n = 32, double tol = 1e-10) {
  return detail::timed("exact plane-wave decay", [=]() -> std::pair<bool, std::string> {
    const Grid2D g(n);
    double worst = 0.0;
    int cases = 0;
    for (double kappa : {1.0, 0.5}) {
      for (double alpha : {0.3, 0.5, 1.0}) {
        for (const auto& k : std::vector<std::pair<int, int>>{{1, 0}, {3, 4}}) {
          SolverConfig c;
          c.alpha = alpha;
          c.kappa = kappa;
          c.n = n;
          c.t_end = 1.0;
          c.dt_policy = CflStep{0.5};
          c.diag_every = 0.05;
          c.snapshot_every = 1.0;
          const SpectralField th0 = single_mode(g, k.first, k.second, 1.0);
          StateRecorder rec;
          run(c, th0, {&rec});
          const double rate = kappa * std::pow(std::hypot(k.first, k.second), alpha);
          for (const auto& s : rec.states) {
            worst = std::max(worst, relative_l2_difference(s.theta, std::exp(-rate * s.t) * th0));
          }
          ++cases;
        }
      }
    }
    return {worst <= tol, std::to_string(cases) + " runs, max rel L2 error " + detail::sci(worst) +
                              " (tol " + detail::sci(tol) + ")"};
  });
}

// ---------------------------------------------------------------------------
// Block positivity

inline CheckResult lemma(int trials = 100, int n = 128, std::ostream* table = nullptr) {
  return detail::timed("block dissipation positivity", [=]() -> std::pair<bool, std::string> {
    const auto rows = lemma_sweep({2.0, 4.0, 8.0}, {0.3, 0.5, 1.0}, trials, n);
    bool ok = true;
    double worst_p2 = kInf;
    double overall_min = kInf;
    for (const auto& r : rows) {
      ok = ok && r.passed;
      overall_min = std::min(overall_min, r.min_ratio);
      if (r.p == 2.0) worst_p2 = std::min(worst_p2, r.min_ratio - r.lower_bound);
      if (table) {
        *table << "  p=" << r.p << " alpha=" << r.alpha << " samples=" << r.samples
               << " min=" << detail::fix(r.min_ratio, 6) << " median=" << detail::fix(r.median_ratio, 6)
               << " 1/c=" << detail::fix(r.empirical_c, 6) << " bound=" << detail::fix(r.lower_bound, 6)
               << (r.passed ? "" : "  FAIL") << "\n";
      }
    }
    return {ok, std::to_string(trials) + " fields x all shells x p{2,4,8} x alpha{0.3,0.5,1}: min ratio " +
                    detail::fix(overall_min, 6) + ", p=2 margin over 2^-alpha " + detail::sci(worst_p2)};
  });
}

// ---------------------------------------------------------------------------
// Paraproduct

inline CheckResult paraproduct(int n = 128, double alpha = 0.5, double p = 4.0,
                               std::uint64_t seed = 11, double tol = 1e-10,
                               std::ostream* table = nullptr) {
  return detail::timed("paraproduct exactness", [=]() -> std::pair<bool, std::string> {
    const Grid2D g(n);
    const DyadicFilterBank bank(g, FilterProfile::sharp);
    const SpectralField theta = random_field(g, seed);
    std::vector<int> shells;
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) shells.push_back(j);
    const ParaproductReport rep = paraproduct_identity_suite(bank, velocity(theta, alpha), theta, shells, p);
    if (table) {
      for (const auto& s : rep.shells) {
        *table << "  j=" << s.j << " defect=" << detail::sci(s.defect) << " I1=" << detail::sci(s.I1)
               << " I2=" << detail::sci(s.I2) << " I3=" << detail::sci(s.I3)
               << " I11=" << detail::sci(s.I11) << " I12=" << detail::sci(s.I12)
               << " I13=" << detail::sci(s.I13) << " split=" << detail::sci(s.split_defect)
               << " C_comm=" << detail::fix(s.commutator_constant, 4) << "\n";
      }
    }
    const bool ok = rep.max_defect <= tol && rep.max_i12_relative <= tol && rep.max_split_defect <= tol;
    return {ok, "n=" + std::to_string(n) + " p=" + detail::fix(p, 1) + " max T1+T2+T3 defect " +
                    detail::sci(rep.max_defect) + ", |I12|/scale " + detail::sci(rep.max_i12_relative) +
                    ", I1 split defect " + detail::sci(rep.max_split_defect) + ", commutator C " +
                    detail::fix(rep.max_commutator_constant, 3) + " (tol " + detail::sci(tol) + ")"};
  });
}

/// Divergence-free velocity gives I12 = 0; a gradient field does not.
inline CheckResult paraproduct_contrast(int n = 64, double p = 4.0, std::uint64_t seed = 5) {
  return detail::timed("I12 solenoidal contrast", [=]() -> std::pair<bool, std::string> {
    const Grid2D g(n);
    const DyadicFilterBank bank(g, FilterProfile::sharp);
    const SpectralField theta = random_field(g, seed);
    const SpectralField phi = fractional_laplacian(random_field(g, seed + 1), -1.0);
    const VelocityField grad_u(derivative(phi, 0), derivative(phi, 1));
    const std::vector<int> shells{2, 3};
    const auto sol = paraproduct_identity_suite(bank, velocity(theta, 0.5), theta, shells, p);
    const auto comp = paraproduct_identity_suite(bank, grad_u, theta, shells, p);
    const bool ok = sol.max_i12_relative <= 1e-10 && comp.max_i12_relative >= 1e-3;
    return {ok, "divergence-free |I12|/scale " + detail::sci(sol.max_i12_relative) +
                    ", gradient velocity " + detail::sci(comp.max_i12_relative)};
  });
}

// ---------------------------------------------------------------------------
// Energy

inline CheckResult energy(int n = 256, double t_end = 1.0, double sigma = 0.5,
                          double alpha = 0.5, double kappa = 0.1, std::uint64_t seed = 7,
                          double amp = 1.0, double tol = 1e-6) {
  return detail::timed("energy balance", [=]() -> std::pair<bool, std::string> {
    SolverConfig c;
    c.alpha = alpha;
    c.kappa = kappa;
    c.n = n;
    c.t_end = t_end;
    c.dt_policy = CflStep{sigma};
    c.diag_every = 0.0;
    c.snapshot_every = t_end;
    const Grid2D g(n);
    const DyadicFilterBank bank(g, FilterProfile::smooth);
    DiagnosticOptions opt;
    opt.blocks = false;
    opt.u_holder = false;
    DiagnosticCollector col(bank, opt);
    const SimulationState s = run(c, spectral_decay(g, 2.0, seed, amp), {&col});
    const EnergyReport e = energy_report(col.records, kappa);
    return {e.relative_residual <= tol,
            "n=" + std::to_string(n) + " steps=" + std::to_string(s.steps) + " E0=" +
                detail::fix(e.initial_energy, 4) + " dissipated=" + detail::fix(e.dissipated, 4) +
                " relative residual " + detail::sci(e.relative_residual) + " (tol " + detail::sci(tol) + ")"};
  });
}

// ---------------------------------------------------------------------------
// L^inf decay

inline CheckResult linf_decay(double alpha, int n = 128, double t_end = 8.0, double kappa = 1.0,
                              std::uint64_t seed = 7, double amp = 1.0) {
  return detail::timed("L^inf decay alpha=" + detail::fix(alpha, 2), [=]() -> std::pair<bool, std::string> {
    SolverConfig c;
    c.alpha = alpha;
    c.kappa = kappa;
    c.n = n;
    c.t_end = t_end;
    c.dt_policy = CflStep{0.5};
    c.diag_every = 0.0;
    c.snapshot_every = t_end;
    const Grid2D g(n);
    const DyadicFilterBank bank(g, FilterProfile::smooth);
    DiagnosticOptions opt;
    opt.blocks = false;
    opt.u_holder = false;
    DiagnosticCollector col(bank, opt);
    run(c, spectral_decay(g, 2.0, seed, amp), {&col});
    const LinfDecayReport r = linf_decay_check(col.records, kappa, alpha);
    return {r.passed, "records=" + std::to_string(col.records.size()) + " max step increase " +
                          detail::sci(r.worst_increase) + " (tol 1e-8), sup r(t)=" +
                          detail::fix(r.sup_ratio, 5) + " at t=" + detail::fix(r.t_at_sup, 3) +
                          ", tail slope " + detail::sci(r.tail_slope)};
  });
}

// ---------------------------------------------------------------------------
// Velocity Hoelder ratio

inline CheckResult u_holder(double alpha = 0.5, int n = 128, double t = 0.5, double kappa = 1.0,
                            std::uint64_t seed = 3) {
  return detail::timed("velocity Hoelder ratio", [=]() -> std::pair<bool, std::string> {
    auto evolve = [&](int m) {
      SolverConfig c;
      c.alpha = alpha;
      c.kappa = kappa;
      c.n = m;
      c.t_end = t;
      c.dt_policy = CflStep{0.5};
      c.diag_every = t;
      c.snapshot_every = t;
      return run(c, spectral_decay(Grid2D(m), 2.0, seed, 1.0)).theta;
    };
    const UHolderRefinement r =
        u_holder_refinement(evolve(n), evolve(2 * n), alpha, FilterProfile::smooth);
    return {r.passed, "ratio n=" + std::to_string(n) + ": " + detail::fix(r.coarse, 6) + ", n=" +
                          std::to_string(2 * n) + ": " + detail::fix(r.fine, 6) + ", change " +
                          detail::fix(100.0 * r.relative_change, 3) + "% (limit 20%)"};
  });
}

// ---------------------------------------------------------------------------
// Scaling

inline CheckResult scaling_single_mode(int n = 64, double alpha = 0.5, double kappa = 1.0,
                                       double t_end = 1.0, double tol = 1e-10) {
  return detail::timed("scaling invariance single mode", [=]() -> std::pair<bool, std::string> {
    const ScalingReport r =
        scaling_invariance_check(single_mode(Grid2D(n), 1, 0, 1.0), alpha, kappa, t_end, CflStep{0.5});
    return {r.discrepancy <= tol, "n=" + std::to_string(n) + "/" + std::to_string(2 * n) +
                                      " discrepancy " + detail::sci(r.discrepancy) + " (tol " +
                                      detail::sci(tol) + ")"};
  });
}

inline CheckResult scaling_two_mode(int n = 64, double alpha = 0.5, double kappa = 0.1,
                                    double t_end = 1.0, double tol = 1e-6) {
  return detail::timed("scaling invariance two mode", [=]() -> std::pair<bool, std::string> {
    const ScalingReport r = scaling_invariance_check(two_mode(Grid2D(n), 1, 0, 1.0, 0, 2, 1.0), alpha,
                                                     kappa, t_end, CflStep{0.5});
    return {r.discrepancy <= tol, "n=" + std::to_string(n) + "/" + std::to_string(2 * n) + " steps " +
                                      std::to_string(r.steps_coarse) + "/" + std::to_string(r.steps_fine) +
                                      " discrepancy " + detail::sci(r.discrepancy) + " (tol " +
                                      detail::sci(tol) + ")"};
  });
}

// ---------------------------------------------------------------------------
// Bootstrap

inline BootstrapParams default_bootstrap_params(double delta, double alpha) {
  BootstrapParams p;
  p.delta = delta;
  p.alpha = alpha;
  p.t_end = bootstrap_case(interpolated_exponent(delta, p.p), alpha) == BootstrapCase::doubling ? 5.0 : 10.0;
  return p;
}

inline CheckResult bootstrap(const BootstrapParams& prm, std::ostream* table = nullptr) {
  return detail::timed("bootstrap delta=" + detail::fix(prm.delta, 2) + " alpha=" + detail::fix(prm.alpha, 2),
                       [=]() -> std::pair<bool, std::string> {
    const BootstrapReport r = bootstrap_experiment(prm);
    const std::size_t ti = r.regime == BootstrapCase::doubling ? 1 : 2;
    if (table) {
      for (std::size_t i = 0; i < r.times.size(); ++i) {
        *table << "  t=" << detail::fix(r.times[i], 3) << " target norm n=" << prm.n << ": "
               << detail::sci(r.series_coarse[ti][i])
               << " n=" << 2 * prm.n << ": "
               << detail::sci(r.series_fine[ti][i])
               << " growth " << detail::fix(r.target_growth[i], 5) << "\n";
      }
    }
    return {r.passed, std::string(to_string(r.regime)) + " delta1=" + detail::fix(r.delta1, 4) +
                          " target=" + detail::fix(r.target, 4) + " predicted delta'=" +
                          detail::fix(r.delta_prime, 4) + " (gain " + detail::fix(r.predicted_gain, 4) +
                          "); t=0 growth " + detail::fix(r.initial_growth, 4) + " > " +
                          detail::fix(r.divergence_threshold, 4) + "? " + (r.diverges_initially ? "yes" : "no") +
                          "; t>=t0' growth " + detail::fix(r.late_growth, 4) + " < " +
                          detail::fix(prm.growth_limit, 2) + "? " + (r.uniform_late ? "yes" : "no") +
                          "; observed exponent gain " + detail::fix(r.measured_gain, 3)};
  });
}

// ---------------------------------------------------------------------------
// Named suites for the verify command

inline std::vector<std::string> suite_names() {
  return {"operators", "lemma", "paraproduct", "energy", "decay", "scaling", "bootstrap", "all"};
}

inline std::vector<CheckResult> run_suite(std::string_view name, const VerifyParams& v,
                                          std::ostream& table) {
  std::vector<CheckResult> out;
  const bool all = name == "all";
  bool known = all;
  if (all || name == "operators") {
    known = true;
    out.push_back(operator_identities(v.n.value_or(128)));
    out.push_back(plane_waves());
  }
  if (all || name == "lemma") {
    known = true;
    out.push_back(lemma(v.trials.value_or(100), v.n.value_or(128), &table));
  }
  if (all || name == "paraproduct") {
    known = true;
    out.push_back(paraproduct(v.n.value_or(128), v.alpha.value_or(0.5), v.p.value_or(4.0),
                              v.seed.value_or(11), 1e-10, &table));
    out.push_back(paraproduct_contrast());
  }
  if (all || name == "energy") {
    known = true;
    out.push_back(energy(v.n.value_or(256), v.t_end.value_or(1.0), v.cfl_safety.value_or(0.5),
                         v.alpha.value_or(0.5), v.kappa.value_or(0.1), v.seed.value_or(7),
                         v.amp.value_or(1.0)));
  }
  if (all || name == "decay") {
    known = true;
    if (v.alpha) {
      out.push_back(linf_decay(*v.alpha, v.n.value_or(128), v.t_end.value_or(8.0), v.kappa.value_or(1.0)));
    } else {
      out.push_back(linf_decay(0.5, v.n.value_or(128)));
      out.push_back(linf_decay(1.0, v.n.value_or(128)));
    }
    const double a = v.alpha.value_or(0.5);
    if (a < 1.0) out.push_back(u_holder(a, v.n.value_or(128)));
  }
  if (all || name == "scaling") {
    known = true;
    out.push_back(scaling_single_mode(v.n.value_or(64), v.alpha.value_or(0.5)));
    out.push_back(scaling_two_mode(v.n.value_or(64), v.alpha.value_or(0.5)));
  }
  if (all || name == "bootstrap") {
    known = true;
    std::vector<std::pair<double, double>> cases;
    if (v.delta || v.alpha) {
      cases.emplace_back(v.delta.value_or(0.2), v.alpha.value_or(0.5));
    } else {
      cases = {{0.2, 0.5}, {0.8, 0.3}};
    }
    for (auto [d, a] : cases) {
      BootstrapParams prm = default_bootstrap_params(d, a);
      if (v.n) prm.n = *v.n;
      if (v.kappa) prm.kappa = *v.kappa;
      if (v.t_end) prm.t_end = *v.t_end;
      if (v.p) prm.p = *v.p;
      if (v.seed) prm.seed = *v.seed;
      if (v.amp) prm.amp = *v.amp;
      if (v.cfl_safety) prm.cfl_safety = *v.cfl_safety;
      table << "bootstrap delta=" << d << " alpha=" << a << ": predicted delta' = "
            << improved_exponent(d, a) << "\n";
      out.push_back(bootstrap(prm, &table));
    }
  }
  if (!known) throw ConfigError("unknown suite '" + std::string(name) + "'");
  return out;
}

}  // namespace mqg::suites
