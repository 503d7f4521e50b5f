#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mqg/diagnostics.hpp"
#include "mqg/integrator.hpp"
#include "mqg/io.hpp"
#include "mqg/suites.hpp"
#include "mqg/verification.hpp"

namespace mqg::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kBlowUp = 2, kCheckFailed = 3 };

// ---------------------------------------------------------------------------
// run

inline int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  io::RunConfig rc;
  SpectralField theta0{Grid2D(8)};
  try {
    rc = io::read_run_config(config_path);
    theta0 = io::build_initial_data(rc);
    std::filesystem::create_directories(rc.output_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  const Grid2D g(rc.solver.n);
  const DyadicFilterBank bank(g, rc.filter_profile);
  try {
    io::SnapshotWriter snaps(rc.output_dir);
    io::DiagCsvWriter diag(rc.output_dir / "diag.csv", bank, DiagnosticOptions{});
    const SimulationState s = run(rc.solver, theta0, {&snaps, &diag});
    out << "t=" << io::format_double(s.t) << " steps=" << s.steps << " snapshots=" << snaps.written.size()
        << " output=" << rc.output_dir.string() << "\n";
  } catch (const BlowUp& e) {
    err << "blow-up: " << e.what() << "\n";
    return kBlowUp;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

inline void print_check(std::ostream& out, const suites::CheckResult& r) {
  out << (r.passed ? "PASS" : "FAIL") << "  " << r.name << ": " << r.detail << " ["
      << suites::detail::fix(r.seconds, 2) << " s]\n";
}

inline int cmd_verify(const std::string& suite, const std::optional<std::filesystem::path>& config,
                      std::ostream& out, std::ostream& err) {
  suites::VerifyParams params;
  try {
    const auto names = suites::suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
      throw ConfigError("unknown suite '" + suite + "'");
    }
    if (config) params = suites::parse_verify_params(io::read_key_values(*config, suites::verify_config_keys()));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  std::vector<suites::CheckResult> results;
  try {
    results = suites::run_suite(suite, params, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  bool ok = true;
  for (const auto& r : results) {
    print_check(out, r);
    ok = ok && r.passed;
  }
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeRequest {
  std::vector<std::pair<double, double>> besov;  // (s, p)
  std::vector<double> holder;
  std::vector<double> blocks;
  FilterProfile profile = FilterProfile::smooth;
};

/// Parses "s,p" for --besov.
inline std::pair<double, double> parse_besov_flag(const std::string& v) {
  const auto parts = io::split(v, ',');
  if (parts.size() != 2) throw ConfigError("--besov expects 's,p'");
  return {io::parse_double(parts[0], "--besov s"), io::parse_double(parts[1], "--besov p")};
}

/// CSV columns: quantity,s,p,j,value. Per-shell rows carry j; totals leave it empty.
inline void analyze_field(const SpectralField& f, const AnalyzeRequest& req, std::ostream& out) {
  const DyadicFilterBank bank(f.grid, req.profile);
  out << "quantity,s,p,j,value\n";
  for (auto [s, p] : req.besov) {
    const BesovIndex idx(s, p, kInf);
    const auto norms = block_norms(bank, f, {p});
    for (std::size_t i = 0; i < norms.size(); ++i) {
      const int j = bank.j_min() + static_cast<int>(i);
      out << "besov_block," << io::format_double(s) << ',' << io::p_label(p) << ',' << j << ','
          << io::format_double(std::exp2(j * s) * norms[i][0]) << '\n';
    }
    out << "besov," << io::format_double(s) << ',' << io::p_label(p) << ",,"
        << io::format_double(besov_norm(bank, f, idx)) << '\n';
  }
  for (double d : req.holder) {
    out << "holder," << io::format_double(d) << ",inf,," << io::format_double(holder_norm(bank, f, d)) << '\n';
  }
  for (double p : req.blocks) {
    const auto norms = block_norms(bank, f, {p});
    for (std::size_t i = 0; i < norms.size(); ++i) {
      out << "block,," << io::p_label(p) << ',' << bank.j_min() + static_cast<int>(i) << ','
          << io::format_double(norms[i][0]) << '\n';
    }
  }
}

inline int cmd_analyze(const std::filesystem::path& snapshot, const AnalyzeRequest& req,
                       std::ostream& out, std::ostream& err) {
  SpectralField f{Grid2D(8)};
  try {
    const io::Snapshot snap = io::read_snapshot(snapshot);
    f = to_spectral(snap.field);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    analyze_field(f, req, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepConfig {
  std::vector<double> alpha, kappa, delta;
  std::vector<std::uint64_t> seed{1};
  BootstrapParams base;
  std::optional<double> t_end;
  int threads = 0;  // 0: hardware concurrency
  std::filesystem::path output_dir;
};

inline const std::set<std::string>& sweep_config_keys() {
  static const std::set<std::string> keys{"alpha", "kappa", "delta", "seed", "p", "t_end", "n",
                                          "amp", "records", "filter_profile", "cfl_safety",
                                          "threads", "output_dir"};
  return keys;
}

inline SweepConfig parse_sweep_config(const io::KeyValues& kv) {
  for (const char* key : {"alpha", "delta", "output_dir"}) {
    if (!kv.count(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  }
  auto list = [&](const char* key) {
    std::vector<double> v;
    for (const auto& tok : io::split(kv.at(key), ',')) v.push_back(io::parse_double(tok, key));
    return v;
  };
  SweepConfig c;
  c.alpha = list("alpha");
  c.delta = list("delta");
  c.kappa = kv.count("kappa") ? list("kappa") : std::vector<double>{1.0};
  if (kv.count("seed")) {
    c.seed.clear();
    for (const auto& tok : io::split(kv.at("seed"), ',')) {
      const long long s = io::parse_int(tok, "seed");
      if (s < 0) throw ConfigError("seed: must be non-negative");
      c.seed.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (kv.count("p")) c.base.p = io::parse_double(kv.at("p"), "p");
  if (kv.count("t_end")) c.t_end = io::parse_double(kv.at("t_end"), "t_end");
  if (kv.count("n")) c.base.n = static_cast<int>(io::parse_int(kv.at("n"), "n"));
  if (kv.count("amp")) c.base.amp = io::parse_double(kv.at("amp"), "amp");
  if (kv.count("records")) c.base.records = static_cast<int>(io::parse_int(kv.at("records"), "records"));
  if (kv.count("filter_profile")) c.base.profile = io::parse_profile(kv.at("filter_profile"));
  if (kv.count("cfl_safety")) c.base.cfl_safety = io::parse_double(kv.at("cfl_safety"), "cfl_safety");
  if (kv.count("threads")) c.threads = static_cast<int>(io::parse_int(kv.at("threads"), "threads"));
  c.output_dir = kv.at("output_dir");
  if (c.alpha.empty() || c.delta.empty() || c.kappa.empty() || c.seed.empty()) {
    throw ConfigError("sweep lists must be non-empty");
  }
  return c;
}

struct SweepPoint {
  double alpha, kappa, delta;
  std::uint64_t seed;
};

struct SweepRow {
  SweepPoint point;
  std::optional<BootstrapReport> report;
  std::string error;
};

/// Grid order: alpha outermost, then kappa, delta, seed.
inline std::vector<SweepPoint> sweep_points(const SweepConfig& c) {
  std::vector<SweepPoint> pts;
  for (double a : c.alpha)
    for (double k : c.kappa)
      for (double d : c.delta)
        for (std::uint64_t s : c.seed) pts.push_back({a, k, d, s});
  return pts;
}

inline BootstrapParams sweep_params(const SweepConfig& c, const SweepPoint& pt) {
  BootstrapParams p = c.base;
  p.alpha = pt.alpha;
  p.kappa = pt.kappa;
  p.delta = pt.delta;
  p.seed = pt.seed;
  p.t_end = c.t_end ? *c.t_end : suites::default_bootstrap_params(pt.delta, pt.alpha).t_end;
  return p;
}

inline std::vector<SweepRow> run_sweep(const SweepConfig& c) {
  const auto pts = sweep_points(c);
  std::vector<SweepRow> rows(pts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < pts.size();) {
      rows[i].point = pts[i];
      try {
        rows[i].report = bootstrap_experiment(sweep_params(c, pts[i]));
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nthreads =
      std::min<std::size_t>(pts.size(), c.threads > 0 ? static_cast<std::size_t>(c.threads) : hw);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

inline std::string sweep_csv_header() {
  return "alpha,kappa,delta,seed,p,delta1,regime,target,delta_prime,initial_growth,late_growth,"
         "divergence_threshold,measured_gain,diverges_initially,uniform_late,passed,error";
}

inline std::string sweep_csv_row(const SweepRow& r) {
  using io::format_double;
  std::string s = format_double(r.point.alpha) + ',' + format_double(r.point.kappa) + ',' +
                  format_double(r.point.delta) + ',' + std::to_string(r.point.seed) + ',';
  if (r.report) {
    const BootstrapReport& b = *r.report;
    s += format_double(b.p) + ',' + format_double(b.delta1) + ',' + to_string(b.regime) + ',' +
         format_double(b.target) + ',' + format_double(b.delta_prime) + ',' +
         format_double(b.initial_growth) + ',' + format_double(b.late_growth) + ',' +
         format_double(b.divergence_threshold) + ',' + format_double(b.measured_gain) + ',' +
         (b.diverges_initially ? "1" : "0") + ',' + (b.uniform_late ? "1" : "0") + ',' +
         (b.passed ? "1" : "0") + ',';
  } else {
    std::string msg = r.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    s += ",,,,,,,,,,,0," + msg;
  }
  return s;
}

inline int cmd_sweep(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  SweepConfig c;
  try {
    c = parse_sweep_config(io::read_key_values(config_path, sweep_config_keys()));
    if (c.output_dir.is_relative()) c.output_dir = config_path.parent_path() / c.output_dir;
    std::filesystem::create_directories(c.output_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  const auto rows = run_sweep(c);
  std::ofstream csv(c.output_dir / "sweep.csv", std::ios::binary | std::ios::trunc);
  if (!csv) {
    err << "error: cannot write sweep.csv\n";
    return kConfigError;
  }
  csv << sweep_csv_header() << '\n';
  std::size_t failed = 0;
  for (const auto& r : rows) {
    csv << sweep_csv_row(r) << '\n';
    if (!r.report) {
      ++failed;
      err << "point alpha=" << r.point.alpha << " delta=" << r.point.delta << ": " << r.error << "\n";
    }
  }
  out << rows.size() << " points, " << failed << " errors, written to "
      << (c.output_dir / "sweep.csv").string() << "\n";
  return !rows.empty() && failed == rows.size() ? kConfigError : kOk;
}

}  // namespace mqg::cli
