#pragma once

// Exact stochastic particle system for collision-induced breakage.
//
// Every ordered pair (i, j), i != j, fires at rate a(x_i, x_j) / V; the focal particle
// i breaks into fragments drawn from b(., x_i, x_j) and the partner is untouched.
// V is fixed from the initial sample so that (1/V) sum x_i equals the truncated mass
// of f_in; M1 snapshots are then the same number in every replica.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "nlbe/daughter.hpp"
#include "nlbe/errors.hpp"
#include "nlbe/grid.hpp"
#include "nlbe/kernel.hpp"

namespace nlbe {

/// Correctly rounded sum (Shewchuk partials, as in Python's math.fsum).
class ExactSum {
 public:
  void add(double x) {
    std::size_t i = 0;
    for (double y : partials_) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  double value() const {
    if (partials_.empty()) return 0.0;
    std::size_t n = partials_.size();
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      lo = y - (hi - x);
      if (lo != 0.0) break;
    }
    // round-half-even correction across the remaining partials
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
};

inline double exact_sum(const std::vector<double>& xs) {
  ExactSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

/// Prefix sums over non-negative weights with O(log n) update and inverse lookup.
class FenwickTree {
 public:
  std::size_t size() const { return values_.size(); }

  void push_back(double w) {
    // grow by rebuilding; amortised through geometric capacity
    if (values_.size() + 1 > capacity_) {
      capacity_ = std::max<std::size_t>(16, 2 * capacity_);
      std::vector<double> vals = values_;
      vals.push_back(w);
      rebuild(vals, capacity_);
      return;
    }
    values_.push_back(0.0);
    set(values_.size() - 1, w);
  }

  void set(std::size_t i, double w) {
    const double delta = w - values_[i];
    values_[i] = w;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }

  double value(std::size_t i) const { return values_[i]; }

  /// Smallest index whose inclusive prefix sum exceeds `target`.
  std::size_t find(double target) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 < tree_.size()) step *= 2;
    for (; step > 0; step /= 2) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return std::min(pos, values_.size() - 1);
  }

  void rebuild(const std::vector<double>& vals, std::size_t capacity) {
    capacity_ = std::max(capacity, vals.size());
    values_ = vals;
    tree_.assign(capacity_ + 1, 0.0);
    for (std::size_t i = 0; i < vals.size(); ++i) tree_[i + 1] = vals[i];
    for (std::size_t k = 1; k <= capacity_; ++k) {
      const std::size_t parent = k + (k & (~k + 1));
      if (parent <= capacity_) tree_[parent] += tree_[k];
    }
  }

 private:
  std::vector<double> tree_;  // 1-based, sized capacity + 1
  std::vector<double> values_;
  std::size_t capacity_ = 0;
};

struct ParticleSystem {
  std::vector<double> masses;
  double volume = 1.0;  // V
  double t = 0.0;
  std::uint64_t rng_seed = 0;
  double mass_normalisation = 0.0;  // exact sum of the initial masses
  double target_mass = 0.0;         // int_0^n x f_in, what (1/V) sum x represents

  std::size_t size() const { return masses.size(); }
};

/// Draws N masses from f_in on (0, n). V is chosen so that (1/V) sum x_i equals
/// int_0^n x f_in, the truncated mass of the continuous problem.
template <class URBG>
ParticleSystem init_from_density(const InitialDensity& f_in, double n, std::size_t N, URBG& rng) {
  if (N < 2) throw DomainError("init_from_density: need at least 2 particles");
  const double number = f_in.number(n);
  const double mass = f_in.mass(n);
  if (!(number > 0.0) || !std::isfinite(number) || !(mass > 0.0))
    throw DomainError("init_from_density: f_in is not a normalisable density on (0, n)");
  ParticleSystem sys;
  sys.masses.reserve(2 * N);
  for (std::size_t i = 0; i < N; ++i) sys.masses.push_back(f_in.sample(rng, n));
  sys.mass_normalisation = exact_sum(sys.masses);
  sys.target_mass = mass;
  sys.volume = sys.mass_normalisation / mass;
  return sys;
}

struct GillespieEvent {
  double waiting_time = std::numeric_limits<double>::infinity();
  std::size_t breaker = 0;
  std::size_t partner = 0;
  bool absorbing = false;
};

/// Incremental state for repeated events on one system. Keeps S = sum omega and
/// sum omega^2 as running sums, recomputed exactly every 2^16 events.
class GillespieSimulator {
 public:
  GillespieSimulator(ParticleSystem& sys, const KernelSpec& kernel, const DaughterSpec& daughter)
      : sys_(sys), kernel_(kernel), daughter_(daughter) {
    if (!kernel.is_product())
      throw UnsupportedOperation("particle oracle needs a product-type kernel");
    if (!daughter.samplable())
      throw UnsupportedOperation("particle oracle: daughter " +
                                 std::string(daughter_name(daughter.family())) +
                                 " has no exact fragment sampler");
    if (sys.size() < 2) throw DomainError("particle oracle: need at least 2 particles");
    recompute();
  }

  /// Total event rate A0 (S^2 - sum omega^2) / V.
  double total_rate() const {
    const double pair = std::max(0.0, S_ * S_ - S2_);
    return kernel_.A0() * pair / sys_.volume;
  }

  template <class URBG>
  GillespieEvent step(URBG& rng) {
    const double rate = total_rate();
    if (!(rate > 0.0) || sys_.size() < 2) {
      GillespieEvent ev;
      ev.absorbing = true;
      return ev;
    }
    std::exponential_distribution<double> wait(rate);
    return fire(wait(rng), rng);
  }

  /// Performs one collision after a waiting time `tau` drawn by the caller.
  template <class URBG>
  GillespieEvent fire(double tau, URBG& rng) {
    GillespieEvent ev;
    ev.waiting_time = tau;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // pair (i, j) with probability omega_i omega_j / (S^2 - sum omega^2), i != j
    for (;;) {
      ev.breaker = tree_.find(unif(rng) * S_);
      ev.partner = tree_.find(unif(rng) * S_);
      if (ev.breaker != ev.partner && tree_.value(ev.breaker) > 0.0 &&
          tree_.value(ev.partner) > 0.0)
        break;
    }
    const double y = sys_.masses[ev.breaker];
    const double z = sys_.masses[ev.partner];
    const auto frags = sample_fragments(daughter_, y, z, rng);
    remove_omega(ev.breaker);
    sys_.masses[ev.breaker] = frags[0];
    set_omega(ev.breaker, frags[0]);
    for (std::size_t k = 1; k < frags.size(); ++k) {
      sys_.masses.push_back(frags[k]);
      const double w = kernel_.omega(frags[k]);
      tree_.push_back(w);
      S_ += w;
      S2_ += w * w;
    }
    sys_.t += tau;
    if (++events_since_refresh_ >= (std::size_t{1} << 16)) recompute();
    return ev;
  }

  void recompute() {
    std::vector<double> w(sys_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = kernel_.omega(sys_.masses[i]);
    tree_.rebuild(w, 2 * w.size());
    ExactSum s, s2;
    for (double v : w) {
      s.add(v);
      s2.add(v * v);
    }
    S_ = s.value();
    S2_ = s2.value();
    events_since_refresh_ = 0;
  }

 private:
  void remove_omega(std::size_t i) {
    const double w = tree_.value(i);
    S_ -= w;
    S2_ -= w * w;
  }
  void set_omega(std::size_t i, double x) {
    const double w = kernel_.omega(x);
    tree_.set(i, w);
    S_ += w;
    S2_ += w * w;
  }

  ParticleSystem& sys_;
  const KernelSpec& kernel_;
  const DaughterSpec& daughter_;
  FenwickTree tree_;
  double S_ = 0.0;
  double S2_ = 0.0;
  std::size_t events_since_refresh_ = 0;
};

template <class URBG>
GillespieEvent gillespie_step(ParticleSystem& sys, const KernelSpec& kernel,
                              const DaughterSpec& daughter, URBG& rng) {
  GillespieSimulator sim(sys, kernel, daughter);
  return sim.step(rng);
}

struct MomentSnapshot {
  double t = 0.0;
  double M0 = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
  std::size_t particles = 0;
};

struct ParticleRun {
  std::vector<MomentSnapshot> snapshots;  // one per checkpoint, t = 0 first
  std::size_t events = 0;
  bool aborted = false;    // event cap reached
  bool absorbed = false;   // no further collisions possible
};

inline MomentSnapshot snapshot(const ParticleSystem& sys, double t) {
  ExactSum m1;
  double m2 = 0.0;
  for (double x : sys.masses) {
    m1.add(x);
    m2 += x * x;
  }
  const double w = 1.0 / sys.volume;
  // ratio is exactly 1 while the exact mass sum is unchanged
  const double M1 = sys.mass_normalisation > 0.0
                        ? sys.target_mass * (m1.value() / sys.mass_normalisation)
                        : m1.value() * w;
  return {t, w * static_cast<double>(sys.size()), M1, w * m2, sys.size()};
}

/// Gillespie loop; `checkpoints` must be increasing, t = 0 is always recorded first.
template <class URBG>
ParticleRun run(ParticleSystem& sys, const KernelSpec& kernel, const DaughterSpec& daughter,
                const std::vector<double>& checkpoints, URBG& rng,
                std::size_t event_cap = 100'000'000) {
  ParticleRun out;
  out.snapshots.push_back(snapshot(sys, 0.0));
  GillespieSimulator sim(sys, kernel, daughter);
  std::size_t next = 0;
  while (next < checkpoints.size()) {
    if (out.events >= event_cap) {
      out.aborted = true;
      break;
    }
    const double rate = sim.total_rate();
    if (!(rate > 0.0)) {
      out.absorbed = true;
      break;
    }
    // the next event time decides which checkpoints see the current state
    std::exponential_distribution<double> wait(rate);
    const double tau = wait(rng);
    while (next < checkpoints.size() && sys.t + tau > checkpoints[next]) {
      out.snapshots.push_back(snapshot(sys, checkpoints[next]));
      ++next;
    }
    if (next >= checkpoints.size()) break;
    sim.fire(tau, rng);
    ++out.events;
  }
  if (out.absorbed)
    for (; next < checkpoints.size(); ++next) out.snapshots.push_back(snapshot(sys, checkpoints[next]));
  return out;
}

struct MCConfig {
  std::size_t particle_count = 10'000;  // N
  std::size_t replicas = 25;            // R
  double t_end = 1.0;
  std::vector<double> checkpoint_times;  // empty: 0.01 t_end spacing
  std::uint64_t seed = 0;
  std::size_t event_cap = 100'000'000;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (particle_count < 2) throw DomainError("mc config: particle_count must be >= 2");
    if (replicas < 1) throw DomainError("mc config: replicas must be >= 1");
    if (!(t_end > 0.0)) throw DomainError("mc config: t_end must be > 0");
    for (double t : checkpoint_times)
      if (!(t > 0.0 && t <= t_end)) throw DomainError("mc config: checkpoints must lie in (0, t_end]");
  }

  std::vector<double> resolved_checkpoints() const {
    std::vector<double> times = checkpoint_times;
    if (times.empty())
      for (int k = 1; k <= 100; ++k) times.push_back(t_end * k / 100.0);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (times.back() < t_end) times.push_back(t_end);
    return times;
  }
};

struct MCRow {
  double t = 0.0;
  double M0_mean = 0.0;
  std::optional<double> M0_stderr;  // unset when R = 1
  double M1_mean = 0.0;
  std::optional<double> M1_stderr;
  double M2_mean = 0.0;
  std::optional<double> M2_stderr;
};

struct MCStats {
  std::vector<MCRow> rows;  // t = 0 first, then every checkpoint
  std::size_t replicas = 0;
  std::size_t aborted_replicas = 0;
  std::size_t absorbed_replicas = 0;
  std::size_t total_events = 0;
};

/// Stream for replica r, derived from (seed, r) only.
inline std::mt19937_64 replica_rng(std::uint64_t seed, std::size_t replica) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replica),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(replica) >> 32),
                    0x6e6c6265u};
  return std::mt19937_64(seq);
}

inline ParticleRun run_replica(const InitialDensity& f_in, double n, const KernelSpec& kernel,
                               const DaughterSpec& daughter, const MCConfig& cfg,
                               std::size_t replica) {
  auto rng = replica_rng(cfg.seed, replica);
  auto sys = init_from_density(f_in, n, cfg.particle_count, rng);
  sys.rng_seed = cfg.seed;
  return run(sys, kernel, daughter, cfg.resolved_checkpoints(), rng, cfg.event_cap);
}

/// Mean and standard error across replicas (Welford), replicas ordered by index so
/// the result does not depend on scheduling.
inline MCStats aggregate(const std::vector<ParticleRun>& runs) {
  MCStats st;
  st.replicas = runs.size();
  if (runs.empty()) return st;
  const std::size_t K = runs.front().snapshots.size();
  for (const auto& r : runs) {
    st.aborted_replicas += r.aborted;
    st.absorbed_replicas += r.absorbed;
    st.total_events += r.events;
  }
  for (std::size_t k = 0; k < K; ++k) {
    double mean[3] = {0, 0, 0}, m2[3] = {0, 0, 0};
    std::size_t count = 0;
    for (const auto& r : runs) {
      if (k >= r.snapshots.size()) continue;
      const auto& s = r.snapshots[k];
      const double v[3] = {s.M0, s.M1, s.M2};
      ++count;
      for (int q = 0; q < 3; ++q) {
        const double d = v[q] - mean[q];
        mean[q] += d / static_cast<double>(count);
        m2[q] += d * (v[q] - mean[q]);
      }
    }
    MCRow row;
    row.t = runs.front().snapshots[k].t;
    row.M0_mean = mean[0];
    row.M1_mean = mean[1];
    row.M2_mean = mean[2];
    if (count > 1) {
      const double c = static_cast<double>(count);
      row.M0_stderr = std::sqrt(m2[0] / (c - 1.0) / c);
      row.M1_stderr = std::sqrt(m2[1] / (c - 1.0) / c);
      row.M2_stderr = std::sqrt(m2[2] / (c - 1.0) / c);
    }
    st.rows.push_back(row);
  }
  return st;
}

/// R independent replicas on a worker pool.
inline MCStats ensemble_stats(const InitialDensity& f_in, double n, const KernelSpec& kernel,
                              const DaughterSpec& daughter, const MCConfig& cfg) {
  cfg.validate();
  if (!daughter.samplable())
    throw UnsupportedOperation("particle oracle: daughter " +
                               std::string(daughter_name(daughter.family())) +
                               " has no exact fragment sampler");
  std::vector<ParticleRun> runs(cfg.replicas);
  std::size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, cfg.replicas);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= cfg.replicas) return;
      try {
        runs[r] = run_replica(f_in, n, kernel, daughter, cfg, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(runs);
}

}  // namespace nlbe
