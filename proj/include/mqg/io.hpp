#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mqg/diagnostics.hpp"
#include "mqg/error.hpp"
#include "mqg/grid.hpp"
#include "mqg/initial_data.hpp"
#include "mqg/integrator.hpp"
#include "mqg/littlewood_paley.hpp"

namespace mqg::io {

// ---------------------------------------------------------------------------
// Number formatting and parsing (locale independent)

/// 17 significant digits; "inf"/"-inf"/"nan" for non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError(std::string(what) + ": cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

inline long long parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError(std::string(what) + ": cannot parse integer '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

// ---------------------------------------------------------------------------
// key = value files

using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines; '#' starts a comment. Duplicate or unknown keys
/// (when `allowed` is non-empty) are rejected.
inline KeyValues parse_key_values(std::istream& in, const std::set<std::string>& allowed) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key(trim(v.substr(0, eq)));
    std::string value(trim(v.substr(eq + 1)));
    if (!allowed.empty() && !allowed.count(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
    kv.emplace(std::move(key), std::move(value));
  }
  return kv;
}

inline KeyValues read_key_values(const std::filesystem::path& path,
                                 const std::set<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_key_values(in, allowed);
}

// ---------------------------------------------------------------------------
// Snapshot: "MQG1", u32 version, u32 n, f64 alpha, f64 kappa, f64 t, n*n f64

inline constexpr char kSnapshotMagic[4] = {'M', 'Q', 'G', '1'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  double alpha = 0.0;
  double kappa = 0.0;
  double t = 0.0;
  PhysicalField field{Grid2D(8)};
};

namespace detail {

template <typename T>
void put_le(std::string& out, T v) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.append(reinterpret_cast<const char*>(bits.data()), bits.size());
}

template <typename T>
T get_le(std::string_view& in) {
  if (in.size() < sizeof(T)) throw SnapshotError("snapshot: truncated file");
  std::array<unsigned char, sizeof(T)> bits;
  std::memcpy(bits.data(), in.data(), sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  in.remove_prefix(sizeof(T));
  return std::bit_cast<T>(bits);
}

}  // namespace detail

inline std::string encode_snapshot(const Snapshot& s) {
  std::string out(kSnapshotMagic, 4);
  detail::put_le<std::uint32_t>(out, kSnapshotVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.field.grid.n()));
  detail::put_le(out, s.alpha);
  detail::put_le(out, s.kappa);
  detail::put_le(out, s.t);
  for (double v : s.field.values) detail::put_le(out, v);
  return out;
}

inline Snapshot decode_snapshot(std::string_view in) {
  if (in.size() < 4 || std::memcmp(in.data(), kSnapshotMagic, 4) != 0) {
    throw SnapshotError("snapshot: bad magic");
  }
  in.remove_prefix(4);
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != kSnapshotVersion) {
    throw SnapshotError("snapshot: unsupported version " + std::to_string(version));
  }
  const auto n = detail::get_le<std::uint32_t>(in);
  if (n < 8 || n % 2 != 0 || n > 65536) throw SnapshotError("snapshot: invalid grid size");
  Snapshot s;
  s.alpha = detail::get_le<double>(in);
  s.kappa = detail::get_le<double>(in);
  s.t = detail::get_le<double>(in);
  const Grid2D g(static_cast<int>(n));
  if (in.size() != g.size() * sizeof(double)) {
    throw SnapshotError("snapshot: payload size does not match n");
  }
  std::vector<double> values(g.size());
  for (auto& v : values) v = detail::get_le<double>(in);
  s.field = PhysicalField(g, std::move(values));
  return s;
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  write_file(path, encode_snapshot(s));
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
  return decode_snapshot(read_file(path));
}

inline Snapshot snapshot_of(const SimulationState& s) {
  Snapshot snap;
  snap.alpha = s.config.alpha;
  snap.kappa = s.config.kappa;
  snap.t = s.t;
  snap.field = to_physical(s.theta);
  return snap;
}

// ---------------------------------------------------------------------------
// Run configuration

struct InitSpec {
  enum class Kind { single_mode, two_mode, spectral_decay, file } kind = Kind::single_mode;
  std::vector<double> args;
  std::string path;
};

struct RunConfig {
  SolverConfig solver;
  InitSpec init;
  FilterProfile filter_profile = FilterProfile::smooth;
  std::filesystem::path output_dir;
};

inline const std::set<std::string>& run_config_keys() {
  static const std::set<std::string> keys{"alpha",          "kappa",      "n",
                                          "t_end",          "dt",         "cfl_safety",
                                          "snapshot_every", "diag_every", "init",
                                          "filter_profile", "output_dir"};
  return keys;
}

inline FilterProfile parse_profile(std::string_view v) {
  if (v == "smooth") return FilterProfile::smooth;
  if (v == "sharp") return FilterProfile::sharp;
  throw ConfigError("filter_profile must be 'smooth' or 'sharp', got '" + std::string(v) + "'");
}

inline InitSpec parse_init(std::string_view v) {
  const auto tok = split_ws(v);
  if (tok.empty()) throw ConfigError("init: empty value");
  InitSpec spec;
  auto numbers = [&](std::size_t lo, std::size_t hi) {
    if (tok.size() - 1 < lo || tok.size() - 1 > hi) {
      throw ConfigError("init " + tok[0] + ": wrong number of arguments");
    }
    for (std::size_t i = 1; i < tok.size(); ++i) spec.args.push_back(parse_double(tok[i], "init"));
  };
  if (tok[0] == "single_mode") {
    spec.kind = InitSpec::Kind::single_mode;
    numbers(3, 3);
  } else if (tok[0] == "two_mode") {
    spec.kind = InitSpec::Kind::two_mode;
    numbers(6, 6);
  } else if (tok[0] == "spectral_decay") {
    spec.kind = InitSpec::Kind::spectral_decay;
    numbers(2, 3);
  } else if (tok[0] == "file") {
    if (tok.size() != 2) throw ConfigError("init file: expected one path");
    spec.kind = InitSpec::Kind::file;
    spec.path = tok[1];
  } else {
    throw ConfigError("init: unknown kind '" + tok[0] + "'");
  }
  return spec;
}

inline RunConfig parse_run_config(std::istream& in) {
  const KeyValues kv = parse_key_values(in, run_config_keys());
  for (const char* key : {"alpha", "kappa", "n", "t_end", "init", "output_dir"}) {
    if (!kv.count(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  }
  if (kv.count("dt") == kv.count("cfl_safety")) {
    throw ConfigError("exactly one of 'dt' and 'cfl_safety' must be given");
  }
  RunConfig rc;
  SolverConfig& s = rc.solver;
  s.alpha = parse_double(kv.at("alpha"), "alpha");
  s.kappa = parse_double(kv.at("kappa"), "kappa");
  s.n = static_cast<int>(parse_int(kv.at("n"), "n"));
  s.t_end = parse_double(kv.at("t_end"), "t_end");
  if (kv.count("dt")) {
    s.dt_policy = FixedStep{parse_double(kv.at("dt"), "dt")};
  } else {
    s.dt_policy = CflStep{parse_double(kv.at("cfl_safety"), "cfl_safety")};
  }
  s.snapshot_every = kv.count("snapshot_every")
                         ? parse_double(kv.at("snapshot_every"), "snapshot_every")
                         : s.t_end;
  s.diag_every = kv.count("diag_every") ? parse_double(kv.at("diag_every"), "diag_every") : 0.0;
  rc.init = parse_init(kv.at("init"));
  if (kv.count("filter_profile")) rc.filter_profile = parse_profile(kv.at("filter_profile"));
  rc.output_dir = kv.at("output_dir");
  s.validate();
  return rc;
}

inline RunConfig read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  RunConfig rc = parse_run_config(in);
  if (rc.output_dir.is_relative()) rc.output_dir = path.parent_path() / rc.output_dir;
  if (rc.init.kind == InitSpec::Kind::file && std::filesystem::path(rc.init.path).is_relative()) {
    rc.init.path = (path.parent_path() / rc.init.path).string();
  }
  return rc;
}

inline int as_wavenumber(double v) {
  if (v != std::floor(v)) throw ConfigError("init: wavenumbers must be integers");
  return static_cast<int>(v);
}

inline SpectralField build_initial_data(const RunConfig& rc) {
  const Grid2D g(rc.solver.n);
  const auto& a = rc.init.args;
  auto check_mode = [&](int k1, int k2) {
    if (!g.inside_cutoff(k1, k2)) throw ConfigError("init: mode lies outside the dealiasing cutoff");
  };
  switch (rc.init.kind) {
    case InitSpec::Kind::single_mode: {
      const int k1 = as_wavenumber(a[0]), k2 = as_wavenumber(a[1]);
      check_mode(k1, k2);
      return single_mode(g, k1, k2, a[2]);
    }
    case InitSpec::Kind::two_mode: {
      const int k1 = as_wavenumber(a[0]), k2 = as_wavenumber(a[1]);
      const int l1 = as_wavenumber(a[3]), l2 = as_wavenumber(a[4]);
      check_mode(k1, k2);
      check_mode(l1, l2);
      return two_mode(g, k1, k2, a[2], l1, l2, a[5]);
    }
    case InitSpec::Kind::spectral_decay: {
      if (a[1] < 0 || a[1] != std::floor(a[1])) throw ConfigError("init: seed must be a non-negative integer");
      return spectral_decay(g, a[0], static_cast<std::uint64_t>(a[1]), a.size() > 2 ? a[2] : 1.0);
    }
    case InitSpec::Kind::file: {
      Snapshot snap;
      try {
        snap = read_snapshot(rc.init.path);
      } catch (const SnapshotError& e) {
        throw ConfigError(std::string("init file: ") + e.what());
      }
      if (snap.field.grid.n() != rc.solver.n) throw ConfigError("init file: grid size differs from n");
      return to_spectral(snap.field);
    }
  }
  throw ConfigError("init: unhandled kind");
}

// ---------------------------------------------------------------------------
// Diagnostics CSV: t,l2,linf,h_alpha_half,u_holder,b_<j>_<p>...

inline std::string p_label(double p) { return std::isinf(p) ? "inf" : format_double(p); }

inline std::string diag_csv_header(const DiagnosticRecord& r) {
  std::string h = "t,l2,linf,h_alpha_half,u_holder";
  for (std::size_t row = 0; row < r.block_norms.size(); ++row) {
    for (double p : r.block_ps) {
      h += ",b_" + std::to_string(r.j_min + static_cast<int>(row)) + "_" + p_label(p);
    }
  }
  return h;
}

inline std::string diag_csv_row(const DiagnosticRecord& r) {
  std::string line = format_double(r.t) + "," + format_double(r.l2) + "," + format_double(r.linf) +
                     "," + format_double(r.h_alpha_half) + "," + format_double(r.u_holder);
  for (const auto& row : r.block_norms) {
    for (double v : row) line += "," + format_double(v);
  }
  return line;
}

inline std::string diag_csv(const std::vector<DiagnosticRecord>& records) {
  if (records.empty()) return "t,l2,linf,h_alpha_half,u_holder\n";
  std::string out = diag_csv_header(records.front()) + "\n";
  for (const auto& r : records) out += diag_csv_row(r) + "\n";
  return out;
}

/// Parses a diag.csv back into records, enough to replay the energy and
/// L^inf checks without re-simulating.
inline std::vector<DiagnosticRecord> parse_diag_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("diag csv: empty input");
  const auto header = split(line, ',');
  if (header.size() < 5 || header[0] != "t" || header[1] != "l2" || header[2] != "linf" ||
      header[3] != "h_alpha_half" || header[4] != "u_holder") {
    throw Error("diag csv: unexpected header");
  }
  // Block columns b_<j>_<p>, grouped by j in order.
  std::vector<double> ps;
  std::vector<int> js;
  for (std::size_t c = 5; c < header.size(); ++c) {
    const auto parts = split(header[c], '_');
    if (parts.size() != 3 || parts[0] != "b") throw Error("diag csv: bad column " + header[c]);
    const int j = static_cast<int>(parse_int(parts[1], "column"));
    const double p = parse_double(parts[2], "column");
    if (js.empty() || js.back() != j) js.push_back(j);
    if (js.size() == 1) ps.push_back(p);
  }
  std::vector<DiagnosticRecord> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) throw Error("diag csv: ragged row");
    DiagnosticRecord r;
    r.t = parse_double(f[0], "t");
    r.l2 = parse_double(f[1], "l2");
    r.linf = parse_double(f[2], "linf");
    r.h_alpha_half = parse_double(f[3], "h_alpha_half");
    r.u_holder = parse_double(f[4], "u_holder");
    r.block_ps = ps;
    r.j_min = js.empty() ? 0 : js.front();
    std::size_t c = 5;
    for (std::size_t row = 0; row < js.size(); ++row) {
      std::vector<double> vals;
      for (std::size_t ip = 0; ip < ps.size(); ++ip) vals.push_back(parse_double(f[c++], "block"));
      r.block_norms.push_back(std::move(vals));
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output sinks used by the run command

/// Writes snap_<index>.bin files into a directory.
class SnapshotWriter : public Sink {
 public:
  explicit SnapshotWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void on_snapshot(const SimulationState& s) override {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%06d.bin", count_++);
    write_snapshot(dir_ / name, snapshot_of(s));
    written.push_back(dir_ / name);
  }

  std::vector<std::filesystem::path> written;

 private:
  std::filesystem::path dir_;
  int count_ = 0;
};

/// Streams diagnostic rows to diag.csv as they arrive.
class DiagCsvWriter : public Sink {
 public:
  DiagCsvWriter(const std::filesystem::path& path, const DyadicFilterBank& bank,
                DiagnosticOptions opt)
      : out_(path, std::ios::binary | std::ios::trunc), bank_(bank), opt_(std::move(opt)) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
  }

  void on_diagnostic(const SimulationState& s) override {
    const DiagnosticRecord r = compute_diagnostics(bank_, s, opt_);
    if (!header_written_) {
      out_ << diag_csv_header(r) << '\n';
      header_written_ = true;
    }
    out_ << diag_csv_row(r) << '\n';
    out_.flush();
    if (!out_) throw Error("write failed for diag.csv");
  }

 private:
  std::ofstream out_;
  const DyadicFilterBank& bank_;
  DiagnosticOptions opt_;
  bool header_written_ = false;
};

}  // namespace mqg::io
