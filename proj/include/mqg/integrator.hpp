#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "mqg/error.hpp"
#include "mqg/grid.hpp"
#include "mqg/spectral.hpp"

namespace mqg {

struct FixedStep {
  double dt;
};

struct CflStep {
  double safety = 0.5;
};

using DtPolicy = std::variant<FixedStep, CflStep>;

struct SolverConfig {
  double alpha = 1.0;
  double kappa = 1.0;
  int n = 64;
  DtPolicy dt_policy = CflStep{};
  double t_end = 1.0;
  /// Cadences in model time; 0 means every step.
  double snapshot_every = 0.0;
  double diag_every = 0.0;

  /// Throws ConfigError on violated parameter ranges. t_end = 0 is accepted
  /// and produces a zero-step run.
  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be > 0");
    if (n < 8 || n % 2 != 0) throw ConfigError("n must be even and >= 8");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be >= 0");
    if (!(snapshot_every >= 0.0) || !(diag_every >= 0.0)) {
      throw ConfigError("snapshot_every and diag_every must be >= 0");
    }
    if (const auto* f = std::get_if<FixedStep>(&dt_policy)) {
      if (!(f->dt > 0.0)) throw ConfigError("dt must be > 0");
    } else {
      const double s = std::get<CflStep>(dt_policy).safety;
      if (!(s > 0.0 && s <= 1.0)) throw ConfigError("cfl_safety must lie in (0, 1]");
    }
  }

  double cfl_safety() const {
    const auto* c = std::get_if<CflStep>(&dt_policy);
    return c ? c->safety : 1.0;
  }
};

struct SimulationState {
  double t = 0.0;
  SpectralField theta;
  SolverConfig config;
  long steps = 0;
  /// max|theta| at t = 0; reference for the blow-up guard.
  double linf_initial = 0.0;

  SimulationState(double t_, SpectralField th, SolverConfig c)
      : t(t_), theta(std::move(th)), config(c) {}
};

inline constexpr double kBlowUpFactor = 1e6;
inline constexpr double kCflEpsilon = 1e-30;
/// Step cap used when advection places no limit; dissipation is exact.
inline constexpr double kDissipationCap = 0.1;

/// sup over the grid of |u|.
inline double velocity_linf(const VelocityField& u) {
  auto [a, b] = to_physical_pair(u.u1, u.u2);
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    m = std::max(m, std::hypot(a.values[i], b.values[i]));
  }
  return m;
}

/// sigma * min(2pi / (n ||u||_inf + eps), 0.1 / kappa).
inline double cfl_dt(const SimulationState& s) {
  const double umax = velocity_linf(velocity(s.theta, s.config.alpha));
  const double advective = kTwoPi / (s.theta.grid.n() * umax + kCflEpsilon);
  return s.config.cfl_safety() * std::min(advective, kDissipationCap / s.config.kappa);
}

/// Integrating-factor RK4 for theta_t + u.grad theta + kappa Lambda^alpha theta = 0.
///
/// The linear part is integrated exactly with e^{-kappa |k|^alpha dt}; the
/// factors for the most recent dt are cached.
class Stepper {
 public:
  Stepper(const Grid2D& grid, double alpha, double kappa)
      : grid_(grid), alpha_(alpha), rate_(grid.size()) {
    grid.for_each_mode([&](std::size_t i, int k1, int k2) {
      const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      rate_[i] = k2sum == 0.0 ? 0.0 : kappa * std::pow(k2sum, 0.5 * alpha);
    });
  }

  /// -u . grad theta, dealiased.
  SpectralField nonlinear(const SpectralField& theta) const {
    SpectralField out = advect(velocity(theta, alpha_), theta);
    out *= -1.0;
    return out;
  }

  void advance(SimulationState& s, double dt) {
    if (!(dt > 0.0)) throw Error("step: dt must be > 0");
    factors(dt);
    const std::size_t m = grid_.size();
    const SpectralField& th = s.theta;

    SpectralField a = nonlinear(th);
    a *= dt;
    SpectralField tmp(grid_);
    for (std::size_t i = 0; i < m; ++i) tmp.coeffs[i] = half_[i] * (th.coeffs[i] + 0.5 * a.coeffs[i]);
    SpectralField b = nonlinear(tmp);
    b *= dt;
    for (std::size_t i = 0; i < m; ++i) tmp.coeffs[i] = half_[i] * th.coeffs[i] + 0.5 * b.coeffs[i];
    SpectralField c = nonlinear(tmp);
    c *= dt;
    for (std::size_t i = 0; i < m; ++i) tmp.coeffs[i] = full_[i] * th.coeffs[i] + half_[i] * c.coeffs[i];
    SpectralField d = nonlinear(tmp);
    d *= dt;

    SpectralField next(grid_);
    for (std::size_t i = 0; i < m; ++i) {
      next.coeffs[i] = full_[i] * th.coeffs[i] +
                       (full_[i] * a.coeffs[i] + 2.0 * half_[i] * (b.coeffs[i] + c.coeffs[i]) +
                        d.coeffs[i]) / 6.0;
    }
    next = dealias(std::move(next));
    next.at(0, 0) = 0.0;
    guard(next, s);
    s.theta = std::move(next);
    s.t += dt;
    ++s.steps;
  }

 private:
  void factors(double dt) {
    if (dt == cached_dt_) return;
    half_.resize(rate_.size());
    full_.resize(rate_.size());
    for (std::size_t i = 0; i < rate_.size(); ++i) {
      half_[i] = std::exp(-0.5 * rate_[i] * dt);
      full_[i] = half_[i] * half_[i];
    }
    cached_dt_ = dt;
  }

  static void guard(const SpectralField& next, const SimulationState& s) {
    double bound = 0.0;
    for (const auto& c : next.coeffs) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        throw BlowUp("step: non-finite coefficient at t = " + std::to_string(s.t));
      }
      bound += std::abs(c);
    }
    // sum |c| bounds max|theta|, so the transform is only needed near the limit.
    const double limit = kBlowUpFactor * s.linf_initial;
    if (s.linf_initial > 0.0 && bound > limit) {
      const double linf = lp_norm(to_physical(next), kInf);
      if (linf > limit) {
        throw BlowUp("step: max|theta| = " + std::to_string(linf) + " exceeds 1e6 x initial at t = " +
                     std::to_string(s.t));
      }
    }
  }

  Grid2D grid_;
  double alpha_;
  std::vector<double> rate_;
  double cached_dt_ = -1.0;
  std::vector<double> half_, full_;
};

inline SimulationState make_state(const SolverConfig& config, const SpectralField& theta0) {
  if (theta0.grid.n() != config.n) throw ConfigError("initial data grid does not match n");
  SpectralField th = dealias(theta0);
  th.at(0, 0) = 0.0;
  SimulationState s(0.0, std::move(th), config);
  s.linf_initial = lp_norm(to_physical(s.theta), kInf);
  return s;
}

/// One integrating-factor RK4 step. Under the CFL policy dt may not exceed
/// the unscaled advective bound cfl_dt / sigma.
inline SimulationState step(SimulationState state, double dt) {
  if (std::holds_alternative<CflStep>(state.config.dt_policy)) {
    const double bound = cfl_dt(state) / std::min(state.config.cfl_safety(), 1.0);
    if (dt > bound * (1.0 + 1e-12)) {
      throw Error("step: dt exceeds the CFL bound " + std::to_string(bound));
    }
  }
  if (state.linf_initial == 0.0) state.linf_initial = lp_norm(to_physical(state.theta), kInf);
  Stepper stepper(state.theta.grid, state.config.alpha, state.config.kappa);
  stepper.advance(state, dt);
  return state;
}

/// Consumer of diagnostic and snapshot events; invoked on the integration thread.
class Sink {
 public:
  virtual ~Sink() = default;
  virtual void on_diagnostic(const SimulationState&) {}
  virtual void on_snapshot(const SimulationState&) {}
};

namespace detail {

// Cadence bookkeeping: event m fires at m * every, so times never drift.
struct Cadence {
  double every;
  long fired = 0;

  bool per_step() const { return every <= 0.0; }
  double next() const { return static_cast<double>(fired) * every; }
};

inline void notify(const std::vector<Sink*>& sinks, const SimulationState& s, bool diag, bool snap) {
  for (Sink* sink : sinks) {
    try {
      if (diag) sink->on_diagnostic(s);
      if (snap) sink->on_snapshot(s);
    } catch (const SinkFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw SinkFailure(std::string("sink failed at t = ") + std::to_string(s.t) + " (step " +
                        std::to_string(s.steps) + "): " + e.what());
    }
  }
}

}  // namespace detail

/// Integrates from t = 0 to config.t_end, notifying sinks at t = 0, at each
/// cadence time, and at t_end. Steps are shortened to land on event times.
inline SimulationState run(const SolverConfig& config, const SpectralField& theta0,
                           const std::vector<Sink*>& sinks = {}) {
  config.validate();
  SimulationState s = make_state(config, theta0);
  Stepper stepper(s.theta.grid, config.alpha, config.kappa);
  detail::Cadence diag{config.diag_every, 1}, snap{config.snapshot_every, 1};
  detail::notify(sinks, s, true, true);

  const double t_end = config.t_end;
  const double eps = 1e-12 * std::max(1.0, t_end);
  while (t_end - s.t > eps) {
    double dt = std::holds_alternative<FixedStep>(config.dt_policy)
                    ? std::get<FixedStep>(config.dt_policy).dt
                    : cfl_dt(s);
    double target = t_end;
    if (!diag.per_step()) target = std::min(target, diag.next());
    if (!snap.per_step()) target = std::min(target, snap.next());
    const bool lands = s.t + dt >= target - eps;
    if (lands) dt = target - s.t;
    stepper.advance(s, dt);
    if (lands) s.t = target;

    const bool at_end = t_end - s.t <= eps;
    bool do_diag = diag.per_step() || at_end;
    bool do_snap = snap.per_step() || at_end;
    if (!diag.per_step() && std::abs(s.t - diag.next()) <= eps) {
      do_diag = true;
      ++diag.fired;
    }
    if (!snap.per_step() && std::abs(s.t - snap.next()) <= eps) {
      do_snap = true;
      ++snap.fired;
    }
    if (at_end) s.t = t_end;
    detail::notify(sinks, s, do_diag, do_snap);
  }
  return s;
}

/// Collects every state passed to on_diagnostic.
class StateRecorder : public Sink {
 public:
  void on_diagnostic(const SimulationState& s) override { states.push_back(s); }
  std::vector<SimulationState> states;
};

}  // namespace mqg
