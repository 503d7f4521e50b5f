#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mqg/integrator.hpp"
#include "mqg/littlewood_paley.hpp"
#include "mqg/spectral.hpp"

namespace mqg {

/// One time-stamped row of norms.
struct DiagnosticRecord {
  double t = 0.0;
  double l2 = 0.0;
  std::vector<std::pair<double, double>> lp;  // (p, ||theta||_p)
  double linf = 0.0;
  double h_alpha_half = 0.0;                  // ||Lambda^{alpha/2} theta||_2
  std::vector<double> block_ps;               // columns of block_norms
  std::vector<std::vector<double>> block_norms;  // [j - j_min][ip]
  int j_min = 0;
  struct BesovEntry {
    double s, p, value;
  };
  std::vector<BesovEntry> besov;  // sup_j 2^{js} ||Delta_j theta||_p
  double u_holder = 0.0;
  std::map<std::string, double> ratios;
};

struct DiagnosticOptions {
  std::vector<double> lp_list;
  std::vector<double> block_ps{2.0, kInf};
  std::vector<std::pair<double, double>> besov;  // (s, p)
  bool blocks = true;
  bool u_holder = true;
};

/// L^inf + sup_j 2^{j s} ||Delta_j f||_inf for s in [0, 1); at s = 0 this is
/// the endpoint used for the alpha = 1 velocity.
inline double holder_type_norm(const DyadicFilterBank& bank, const SpectralField& f, double s) {
  if (s > 0.0) return holder_norm(bank, f, s);
  return lp_norm(to_physical(f), kInf) + besov_norm(bank, f, BesovIndex(0.0, kInf, kInf));
}

/// max over components of the C^{1-alpha} norm of u = Lambda^{alpha-1} R^perp theta.
inline double velocity_holder(const DyadicFilterBank& bank, const SpectralField& theta,
                              double alpha) {
  const VelocityField u = velocity(theta, alpha);
  return std::max(holder_type_norm(bank, u.u1, 1.0 - alpha),
                  holder_type_norm(bank, u.u2, 1.0 - alpha));
}

inline DiagnosticRecord compute_diagnostics(const DyadicFilterBank& bank, const SimulationState& s,
                                            const DiagnosticOptions& opt = {}) {
  DiagnosticRecord r;
  r.t = s.t;
  const PhysicalField phys = to_physical(s.theta);
  r.l2 = lp_norm(phys, 2.0);
  r.linf = lp_norm(phys, kInf);
  for (double p : opt.lp_list) r.lp.emplace_back(p, lp_norm(phys, p));
  r.h_alpha_half = sobolev_seminorm(s.theta, 0.5 * s.config.alpha);
  r.j_min = bank.j_min();

  std::vector<double> ps = opt.blocks ? opt.block_ps : std::vector<double>{};
  for (const auto& [sv, p] : opt.besov) {
    if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
  }
  if (!ps.empty()) {
    const auto table = block_norms(bank, s.theta, ps);
    for (const auto& [sv, p] : opt.besov) {
      const auto ip = static_cast<std::size_t>(std::find(ps.begin(), ps.end(), p) - ps.begin());
      std::vector<double> col;
      for (const auto& row : table) col.push_back(row[ip]);
      r.besov.push_back({sv, p, besov_from_blocks(col, bank.j_min(), sv, kInf)});
    }
    if (opt.blocks) {
      r.block_ps = opt.block_ps;
      for (const auto& row : table) {
        r.block_norms.emplace_back(row.begin(), row.begin() + static_cast<long>(opt.block_ps.size()));
      }
    }
  }
  if (opt.u_holder) r.u_holder = velocity_holder(bank, s.theta, s.config.alpha);
  return r;
}

/// Sink turning every diagnostic event into a DiagnosticRecord.
class DiagnosticCollector : public Sink {
 public:
  DiagnosticCollector(const DyadicFilterBank& bank, DiagnosticOptions opt)
      : bank_(bank), opt_(std::move(opt)) {}

  void on_diagnostic(const SimulationState& s) override {
    records.push_back(compute_diagnostics(bank_, s, opt_));
  }

  std::vector<DiagnosticRecord> records;

 private:
  const DyadicFilterBank& bank_;
  DiagnosticOptions opt_;
};

}  // namespace mqg
