#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taskmd/domain.hpp"
#include "taskmd/random.hpp"
#include "taskmd/task_pool.hpp"
#include "taskmd/timers.hpp"

namespace taskmd {

struct EngineConfig {
  double dt = 0.005;
  std::int64_t steps = 0;
  std::optional<LangevinParams> thermostat;
  int n_sub = 1;
  int worker_threads = 1;
  std::int64_t observable_stride = 100;
};

inline void validate_engine_config(const EngineConfig& c) {
  if (!std::isfinite(c.dt) || c.dt == 0.0) {
    throw ConfigError("time step must be finite and nonzero");
  }
  if (c.steps < 0) throw ConfigError("step count must be non-negative");
  if (c.n_sub < 1) throw ConfigError("n_sub must be at least 1");
  if (c.worker_threads < 1) {
    throw ConfigError("worker_threads must be at least 1");
  }
  if (c.observable_stride < 1) {
    throw ConfigError("observable stride must be at least 1");
  }
  if (c.thermostat) validate_langevin(*c.thermostat);
}

struct StepObservables {
  std::int64_t step = 0;
  double kinetic = 0.0;
  double potential = 0.0;
  double temperature = 0.0;
};

// The velocity Verlet loop over a decomposed domain. Each step runs a fixed
// sequence of phases; every phase is a batch of one-task-per-subnode units
// on the worker pool with a full barrier after it, and the main thread
// attributes the wall time of each phase to one timer section:
//
//   Integrate  half-kick + drift
//   Neigh      rebuild-needed checks, and list builds on rebuild steps
//   Resort     re-binning particles into cells (only when triggered)
//   Comm       ghost position updates and ghost force collection
//   Forces     pair and bonded kernels
//   Integrate  thermostat forces + second half-kick
//
// Tasks touch only their own subnode's store (ghost reads included, since
// ghosts are own-store copies), so phases are race-free and, with the
// thermostat noise keyed by particle id and step, results do not depend on
// the worker count or on scheduling order.
class Engine {
 public:
  Engine(Domain domain, const EngineConfig& cfg)
      : d_(std::move(domain)),
        cfg_(cfg),
        pool_(cfg.worker_threads),
        pair_energy_(d_.subs.size(), 0.0),
        bonded_energy_(d_.subs.size(), 0.0),
        rebuild_flags_(d_.subs.size(), 0) {
    validate_engine_config(cfg_);
    compute_forces_untimed();
  }

  // Advances the system by one velocity Verlet step.
  void step() {
    step_ += 1;
    Stopwatch whole;

    run_phase(Section::kIntegrate, make_subnode_tasks([this](int s) {
                half_kick_and_drift(s);
              }));

    run_phase(Section::kNeigh, make_subnode_tasks([this](int s) {
                rebuild_flags_[s] =
                    needs_rebuild(d_.subs[s], d_.snaps[s], d_.r_skin) ? 1 : 0;
              }));
    bool rebuild = false;
    for (char f : rebuild_flags_) rebuild = rebuild || f != 0;

    if (rebuild) {
      Stopwatch w;
      resort_domain(d_);
      timers_.add(Section::kResort, w.seconds());
      rebuilds_ += 1;
    }

    run_phase(Section::kComm, make_subnode_tasks([this](int s) {
                update_ghost_positions(d_.plan, d_.subs, s);
              }));

    if (rebuild) {
      run_phase(Section::kNeigh, make_subnode_tasks([this](int s) {
                  rebuild_subnode_list(d_, s);
                }));
    }

    run_phase(Section::kForces, make_subnode_tasks([this](int s) {
                compute_subnode_forces(s);
              }));
    reduce_potential();

    run_phase(Section::kComm, make_subnode_tasks([this](int s) {
                collect_ghost_forces(d_.plan, d_.subs, s);
              }));

    run_phase(Section::kIntegrate, make_subnode_tasks([this](int s) {
                thermostat_and_half_kick(s);
              }));

    timers_.elapsed += whole.seconds();
  }

  void run(std::int64_t steps) {
    for (std::int64_t s = 0; s < steps; ++s) step();
  }

  StepObservables observe() const {
    const KineticResult k = domain_kinetic(d_);
    StepObservables o;
    o.step = step_;
    o.kinetic = k.kinetic;
    o.potential = potential_;
    o.temperature = k.temperature();
    return o;
  }

  const Domain& domain() const { return d_; }
  Domain& domain() { return d_; }
  const EngineConfig& config() const { return cfg_; }
  const SectionTimers& timers() const { return timers_; }
  std::int64_t step_count() const { return step_; }
  double potential_energy() const { return potential_; }
  std::uint64_t rebuild_count() const { return rebuilds_; }
  std::uint64_t steal_count() const { return pool_.steal_count(); }

 private:
  std::vector<std::function<void()>> make_subnode_tasks(
      const std::function<void(int)>& body) {
    std::vector<std::function<void()>> tasks;
    tasks.reserve(d_.subs.size());
    for (int s = 0; s < d_.n_sub(); ++s) {
      tasks.push_back([body, s] { body(s); });
    }
    return tasks;
  }

  void run_phase(Section section,
                 const std::vector<std::function<void()>>& tasks) {
    Stopwatch w;
    try {
      pool_.run_batch(tasks);
    } catch (const PhysicsError& e) {
      throw PhysicsError(std::string(e.what()) + " (at step " +
                         std::to_string(step_) + ")");
    }
    timers_.add(section, w.seconds());
  }

  void half_kick_and_drift(int s) {
    SoaStore& st = d_.subs[s].store;
    const double half_dt = 0.5 * cfg_.dt;
    for (std::int32_t c : d_.subs[s].interior) {
      const CellSpan& span = st.cells[c];
      for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
        const double inv_m = 1.0 / st.mass[k];
        st.vx[k] += st.fx[k] * inv_m * half_dt;
        st.vy[k] += st.fy[k] * inv_m * half_dt;
        st.vz[k] += st.fz[k] * inv_m * half_dt;
        st.px[k] += st.vx[k] * cfg_.dt;
        st.py[k] += st.vy[k] * cfg_.dt;
        st.pz[k] += st.vz[k] * cfg_.dt;
      }
    }
  }

  void compute_subnode_forces(int s) {
    SoaStore& st = d_.subs[s].store;
    std::fill(st.fx.begin(), st.fx.end(), 0.0);
    std::fill(st.fy.begin(), st.fy.end(), 0.0);
    std::fill(st.fz.begin(), st.fz.end(), 0.0);
    pair_energy_[s] = compute_pair_forces(d_.nlists[s], st, d_.lj_prep);
    bonded_energy_[s] =
        compute_bonded_forces(d_.subs[s], d_.terms[s], d_.inter.fene,
                              d_.inter.angle);
  }

  void reduce_potential() {
    double e = 0.0;
    for (int s = 0; s < d_.n_sub(); ++s) e += pair_energy_[s];
    for (int s = 0; s < d_.n_sub(); ++s) e += bonded_energy_[s];
    potential_ = e;
  }

  void thermostat_and_half_kick(int s) {
    SoaStore& st = d_.subs[s].store;
    const double half_dt = 0.5 * cfg_.dt;
    const bool noisy = cfg_.thermostat.has_value();
    for (std::int32_t c : d_.subs[s].interior) {
      const CellSpan& span = st.cells[c];
      for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
        if (noisy) {
          const Vec3 noise = counter_normal3(
              cfg_.thermostat->seed, RngContext::kThermostat,
              static_cast<std::uint64_t>(step_),
              static_cast<std::uint64_t>(st.id[k]));
          const Vec3 lf = langevin_force(st.velocity(k), st.mass[k],
                                         *cfg_.thermostat, cfg_.dt, noise);
          st.fx[k] += lf.x;
          st.fy[k] += lf.y;
          st.fz[k] += lf.z;
        }
        const double inv_m = 1.0 / st.mass[k];
        st.vx[k] += st.fx[k] * inv_m * half_dt;
        st.vy[k] += st.fy[k] * inv_m * half_dt;
        st.vz[k] += st.fz[k] * inv_m * half_dt;
        if (!std::isfinite(st.vx[k]) || !std::isfinite(st.vy[k]) ||
            !std::isfinite(st.vz[k]) || !std::isfinite(st.fx[k]) ||
            !std::isfinite(st.fy[k]) || !std::isfinite(st.fz[k])) {
          throw PhysicsError("non-finite velocity or force on particle id " +
                             std::to_string(st.id[k]));
        }
      }
    }
  }

  // The loop needs forces for the first half-kick; computed once before any
  // step, outside the timers. Thermostat noise for this evaluation is keyed
  // as step 0.
  void compute_forces_untimed() {
    std::vector<std::function<void()>> tasks;

    tasks = make_subnode_tasks(
        [this](int s) { update_ghost_positions(d_.plan, d_.subs, s); });
    pool_.run_batch(tasks);

    tasks = make_subnode_tasks([this](int s) { compute_subnode_forces(s); });
    pool_.run_batch(tasks);
    reduce_potential();

    tasks = make_subnode_tasks(
        [this](int s) { collect_ghost_forces(d_.plan, d_.subs, s); });
    pool_.run_batch(tasks);

    if (cfg_.thermostat) {
      tasks = make_subnode_tasks([this](int s) {
        SoaStore& st = d_.subs[s].store;
        for (std::int32_t c : d_.subs[s].interior) {
          const CellSpan& span = st.cells[c];
          for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
            const Vec3 noise = counter_normal3(
                cfg_.thermostat->seed, RngContext::kThermostat, 0,
                static_cast<std::uint64_t>(st.id[k]));
            const Vec3 lf = langevin_force(st.velocity(k), st.mass[k],
                                           *cfg_.thermostat, cfg_.dt, noise);
            st.fx[k] += lf.x;
            st.fy[k] += lf.y;
            st.fz[k] += lf.z;
          }
        }
      });
      pool_.run_batch(tasks);
    }
  }

  Domain d_;
  EngineConfig cfg_;
  TaskPool pool_;
  SectionTimers timers_;
  std::vector<double> pair_energy_;
  std::vector<double> bonded_energy_;
  std::vector<char> rebuild_flags_;
  std::int64_t step_ = 0;
  double potential_ = 0.0;
  std::uint64_t rebuilds_ = 0;
};

// One probe measurement of the autotuner.
struct AutotuneProbe {
  int n_sub = 0;
  double seconds = 0.0;
};

struct AutotuneReport {
  std::vector<AutotuneProbe> probes;
  int selected = 0;
  // True when the candidate walk ended because the grid admits no further
  // subdivision, rather than because a probe came out slower than the best.
  bool exhausted = false;
};

// Times short probe runs at n_sub = worker_threads * 2^k, k = 0, 1, 2, ...
// Every probe starts from the same snapshot so measurements are comparable;
// probe timing excludes domain construction and the initial force
// evaluation. The walk stops at the first probe strictly slower than the
// best so far (that probe is recorded: it is the one-level lookahead) or
// when no further subdivision is possible. With full_sweep set, every
// feasible candidate is measured regardless of slowdowns, for mapping the
// whole oversubscription curve. Selection is the argmin of the measured
// times; ties go to the smaller candidate, which carries less ghost
// overhead.
inline AutotuneReport autotune_subnodes(const FlatConfig& cfg,
                                        const Interactions& inter,
                                        double r_skin,
                                        const EngineConfig& base,
                                        int probe_steps,
                                        bool full_sweep = false) {
  if (probe_steps < 10) {
    throw ConfigError("autotune probes need at least 10 steps");
  }
  validate_engine_config(base);

  AutotuneReport report;
  double best = 0.0;
  for (int k = 0;; ++k) {
    const std::int64_t wide =
        static_cast<std::int64_t>(base.worker_threads) << k;
    if (wide > (std::int64_t{1} << 30)) {
      report.exhausted = true;
      break;
    }
    const int n_sub = static_cast<int>(wide);

    EngineConfig probe_cfg = base;
    probe_cfg.n_sub = n_sub;
    Domain probe_domain;
    try {
      probe_domain = build_domain(cfg, inter, r_skin, n_sub);
    } catch (const ConfigError&) {
      // The first candidate failing is a real configuration problem; later
      // ones just mean the grid cannot be subdivided any further.
      if (k == 0) throw;
      report.exhausted = true;
      break;
    }

    Engine eng(std::move(probe_domain), probe_cfg);
    Stopwatch w;
    eng.run(probe_steps);
    const double seconds = w.seconds();
    report.probes.push_back({n_sub, seconds});

    if (report.probes.size() == 1 || seconds < best) best = seconds;
    if (!full_sweep && seconds > best) break;
  }

  if (report.probes.empty()) {
    throw ConfigError("no feasible subnode count: the cell grid is smaller "
                      "than the worker count");
  }
  int arg = 0;
  for (std::size_t i = 1; i < report.probes.size(); ++i) {
    if (report.probes[i].seconds < report.probes[arg].seconds) {
      arg = static_cast<int>(i);
    }
  }
  report.selected = report.probes[arg].n_sub;
  return report;
}

}  // namespace taskmd
