#pragma once

// Adaptive explicit time integration of the sectional system with the
// Bogacki-Shampine 3(2) embedded pair (FSAL).
//
// A step is rejected, and dt halved, when the embedded error estimate exceeds the
// tolerance or when any count drops below -clip_tol. Accepted negatives within
// clip_tol are set to zero and their mass is accumulated in the run statistics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "nlbe/daughter.hpp"
#include "nlbe/errors.hpp"
#include "nlbe/grid.hpp"
#include "nlbe/kernel.hpp"
#include "nlbe/operators.hpp"

namespace nlbe {

struct SolverConfig {
  double dt_init = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 0.05;
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  double t_end = 1.0;
  /// Output times in (0, t_end]; empty means a uniform spacing of 0.01 t_end.
  std::vector<double> checkpoint_times;
  /// Negative counts above -clip_tol are clipped; unset means 1e-14 * M0(0).
  std::optional<double> clip_tol;
  std::size_t max_steps = 10'000'000;

  void validate() const {
    std::ostringstream err;
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
      err << "need 0 < dt_min <= dt_init <= dt_max; ";
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) err << "tolerances must be > 0; ";
    if (!(t_end >= 0.0)) err << "t_end must be >= 0; ";
    if (clip_tol && !(*clip_tol >= 0.0)) err << "clip_tol must be >= 0; ";
    for (double t : checkpoint_times)
      if (!(t > 0.0 && t <= t_end)) err << "checkpoint times must lie in (0, t_end]; ";
    if (!err.str().empty()) throw DomainError("solver config: " + err.str());
  }
};

/// dt fell below dt_min; carries the last accepted state.
class StiffnessFailure : public std::runtime_error {
 public:
  StiffnessFailure(const std::string& what, StateVector last, double dt)
      : std::runtime_error(what), last_(std::move(last)), dt_(dt) {}
  const StateVector& last_state() const { return last_; }
  double dt() const { return dt_; }

 private:
  StateVector last_;
  double dt_;
};

struct StepEvent {
  double t = 0.0;  // time at the start of the attempt
  double dt = 0.0;
  double error_norm = 0.0;
  bool accepted = false;
  bool negative = false;  // rejected because a count dropped below -clip_tol
};

struct RunStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
  std::size_t clip_events = 0;
  double clipped_mass = 0.0;
  double clip_tol = 0.0;
  double dt_smallest = std::numeric_limits<double>::infinity();
  double dt_largest = 0.0;
  bool valid = true;  // false when clipped mass exceeds 1e-9 M1(0)
};

struct Trajectory {
  GridSpec grid;
  std::vector<StateVector> checkpoints;
  std::vector<StepEvent> events;
  RunStats stats;
};

class BogackiShampine {
 public:
  BogackiShampine(const OperatorSet& ops, const SolverConfig& cfg, double clip_tol)
      : ops_(ops), cfg_(cfg), clip_tol_(clip_tol) {
    const std::size_t C = ops.cells();
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_, &y_new_, &scratch_}) v->assign(C, 0.0);
  }

  /// Advances `state` by one accepted step no longer than `t_stop - state.t`.
  /// Returns the dt that was accepted. Throws StiffnessFailure on dt underflow.
  double advance(StateVector& state, double& dt, double t_stop, RunStats& stats,
                 std::vector<StepEvent>* log) {
    const std::size_t C = ops_.cells();
    auto& y = state.counts;
    if (!fsal_valid_) {
      eval(y, k1_, stats);
      fsal_valid_ = true;
    }
    for (;;) {
      const bool final_hit = dt >= t_stop - state.t;
      const double h = final_hit ? t_stop - state.t : dt;
      for (std::size_t i = 0; i < C; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
      eval(tmp_, k2_, stats);
      for (std::size_t i = 0; i < C; ++i) tmp_[i] = y[i] + 0.75 * h * k2_[i];
      eval(tmp_, k3_, stats);
      for (std::size_t i = 0; i < C; ++i)
        y_new_[i] = y[i] + h * (2.0 / 9.0 * k1_[i] + 1.0 / 3.0 * k2_[i] + 4.0 / 9.0 * k3_[i]);
      eval(y_new_, k4_, stats);

      double err = 0.0;
      bool negative = false;
      for (std::size_t i = 0; i < C; ++i) {
        const double e = h * (-5.0 / 72.0 * k1_[i] + 1.0 / 12.0 * k2_[i] + 1.0 / 9.0 * k3_[i] -
                              1.0 / 8.0 * k4_[i]);
        const double sc = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(y_new_[i]));
        err = std::max(err, std::abs(e) / sc);
        if (y_new_[i] < -clip_tol_ || !std::isfinite(y_new_[i])) negative = true;
      }
      if (!std::isfinite(err)) negative = true;
      const bool ok = !negative && err <= 1.0;
      if (log) log->push_back({state.t, h, err, ok, negative});
      if (!ok) {
        ++stats.rejected_steps;
        dt = 0.5 * h;
        if (dt < cfg_.dt_min) {
          std::ostringstream msg;
          msg << "step size underflow at t=" << state.t << " (dt=" << dt
              << " < dt_min=" << cfg_.dt_min << ")";
          throw StiffnessFailure(msg.str(), state, dt);
        }
        continue;
      }

      const auto& xb = ops_.pivots;
      bool clipped = false;
      for (std::size_t i = 0; i < C; ++i) {
        if (y_new_[i] < 0.0) {
          stats.clipped_mass += -y_new_[i] * xb[i];
          ++stats.clip_events;
          y_new_[i] = 0.0;
          clipped = true;
        }
      }
      y.swap(y_new_);
      std::swap(k1_, k4_);  // FSAL, valid unless clipping changed y
      if (clipped) fsal_valid_ = false;
      state.t = final_hit ? t_stop : state.t + h;
      ++stats.accepted_steps;
      stats.dt_smallest = std::min(stats.dt_smallest, h);
      stats.dt_largest = std::max(stats.dt_largest, h);
      const double grow = err > 0.0 ? 0.9 * std::pow(err, -1.0 / 3.0) : 5.0;
      const double next = h * std::clamp(grow, 0.2, 5.0);
      // keep the pre-truncation step when we only shortened to land on t_stop
      dt = std::min(cfg_.dt_max, final_hit ? std::max(next, dt) : next);
      return h;
    }
  }

 private:
  void eval(const std::vector<double>& u, std::vector<double>& out, RunStats& stats) {
    rhs(u, ops_, out, scratch_);
    ++stats.rhs_evaluations;
  }

  const OperatorSet& ops_;
  const SolverConfig& cfg_;
  double clip_tol_;
  bool fsal_valid_ = false;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_, y_new_, scratch_;
};

/// Single accepted step from `state` with trial step dt (in/out).
inline StateVector step(const StateVector& state, const OperatorSet& ops, const SolverConfig& cfg,
                        double& dt, RunStats* stats_out = nullptr) {
  RunStats stats;
  double m0 = 0.0;
  for (double c : state.counts) m0 += c;
  const double clip = cfg.clip_tol ? *cfg.clip_tol : 1e-14 * m0;
  BogackiShampine rk(ops, cfg, clip);
  StateVector s = state;
  rk.advance(s, dt, std::numeric_limits<double>::infinity(), stats, nullptr);
  if (stats_out) *stats_out = stats;
  return s;
}

inline std::vector<double> resolve_checkpoints(const SolverConfig& cfg) {
  std::vector<double> times = cfg.checkpoint_times;
  if (times.empty() && cfg.t_end > 0.0) {
    for (int k = 1; k <= 100; ++k) times.push_back(cfg.t_end * k / 100.0);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (cfg.t_end > 0.0 && (times.empty() || times.back() < cfg.t_end)) times.push_back(cfg.t_end);
  return times;
}

/// Integrates from the projected initial state to t_end and records every checkpoint.
/// The returned trajectory always starts with the initial state at t = 0.
inline Trajectory solve(const StateVector& initial, const OperatorSet& ops, const GridSpec& grid,
                        const SolverConfig& cfg, bool keep_step_log = true) {
  cfg.validate();
  Trajectory tr{grid, {}, {}, {}};
  StateVector s = initial;
  s.t = 0.0;
  tr.checkpoints.push_back(s);

  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < s.counts.size(); ++i) {
    m0 += s.counts[i];
    m1 += grid.pivots()[i] * s.counts[i];
  }
  tr.stats.clip_tol = cfg.clip_tol ? *cfg.clip_tol : 1e-14 * m0;

  BogackiShampine rk(ops, cfg, tr.stats.clip_tol);
  double dt = cfg.dt_init;
  for (double tc : resolve_checkpoints(cfg)) {
    while (s.t < tc) {
      if (tr.stats.accepted_steps >= cfg.max_steps)
        throw StiffnessFailure("step budget exhausted", s, dt);
      rk.advance(s, dt, tc, tr.stats, keep_step_log ? &tr.events : nullptr);
    }
    tr.checkpoints.push_back(s);
  }
  tr.stats.valid = tr.stats.clipped_mass <= 1e-9 * m1;
  return tr;
}

inline Trajectory solve(const InitialDensity& f_in, const KernelSpec& kernel,
                        const DaughterSpec& daughter, const GridSpec& grid,
                        const SolverConfig& cfg) {
  const auto ops = assemble_operators(kernel, daughter, grid);
  return solve(project_initial(f_in, grid).state, ops, grid, cfg);
}

}  // namespace nlbe
