#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "taskmd/domain.hpp"
#include "taskmd/engine.hpp"
#include "taskmd/errors.hpp"
#include "taskmd/io.hpp"
#include "taskmd/oracle.hpp"
#include "taskmd/run_config.hpp"

namespace {

using namespace taskmd;

struct CommonFlags {
  std::string config_path;
  int threads = 0;
  std::int64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = ".";
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "run configuration file")
      ->required();
  cmd->add_option("--threads", flags.threads,
                  "worker thread count (overrides the config)");
  cmd->add_option("--seed", flags.seed, "random seed (overrides the config)")
      ->trigger_on_parse()
      ->each([&flags](const std::string&) { flags.seed_given = true; });
  cmd->add_option("--out", flags.out_dir, "output directory");
}

RunConfig load_config(const CommonFlags& flags) {
  std::ifstream in(flags.config_path);
  if (!in) {
    throw ConfigError("cannot open config file: " + flags.config_path);
  }
  std::ostringstream text;
  text << in.rdbuf();

  RunConfig cfg = parse_run_config(text.str());
  if (flags.threads > 0) cfg.engine.worker_threads = flags.threads;
  if (flags.seed_given) {
    cfg.seed = static_cast<std::uint64_t>(flags.seed);
    if (cfg.engine.thermostat) cfg.engine.thermostat->seed = cfg.seed;
  }
  return cfg;
}

std::string out_path(const std::string& out_dir, const std::string& file) {
  const std::filesystem::path p(file);
  if (p.is_absolute()) return file;
  return (std::filesystem::path(out_dir) / p).string();
}

void ensure_out_dir(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
}

void print_observables(std::ostream& os, const StepObservables& o) {
  os << o.step << ',' << o.kinetic << ',' << o.potential << ','
     << o.temperature << '\n';
}

int resolve_n_sub(const RunConfig& cfg, const FlatConfig& flat) {
  if (!cfg.n_sub_auto) return cfg.engine.n_sub;
  const AutotuneReport report = autotune_subnodes(
      flat, cfg.inter, cfg.r_skin, cfg.engine, cfg.probe_steps,
      cfg.full_sweep);
  std::cerr << "autotune selected n_sub = " << report.selected << '\n';
  return report.selected;
}

// Drives the step loop with trajectory frames, timing records, and
// observable rows. cfg.engine.n_sub must already be concrete.
void run_engine(const RunConfig& cfg, const FlatConfig& flat,
                const std::string& out_dir) {
  Domain domain = build_domain(flat, cfg.inter, cfg.r_skin, cfg.engine.n_sub);
  Engine engine(std::move(domain), cfg.engine);

  std::optional<TrajectoryWriter> traj;
  if (!cfg.output.trajectory_path.empty()) {
    traj.emplace(out_path(out_dir, cfg.output.trajectory_path));
  }
  std::optional<TimingWriter> timing;
  const bool per_step = cfg.output.timing_mode == "per_step";
  if (!cfg.output.timing_path.empty()) {
    timing.emplace(out_path(out_dir, cfg.output.timing_path), per_step);
  }

  std::cout << std::setprecision(17);
  std::cout << "step,kinetic,potential,temperature\n";
  print_observables(std::cout, engine.observe());
  if (traj) traj->write(flatten_domain(engine.domain()), 0);

  for (std::int64_t s = 1; s <= cfg.engine.steps; ++s) {
    const SectionTimers before = engine.timers();
    engine.step();
    if (timing && per_step) {
      SectionTimers delta;
      for (std::size_t i = 0; i < kSectionCount; ++i) {
        delta.seconds[i] = engine.timers().seconds[i] - before.seconds[i];
      }
      timing->record_step(s, delta);
    }
    if (traj && s % cfg.output.trajectory_stride == 0) {
      traj->write(flatten_domain(engine.domain()), s);
    }
    if (s % cfg.engine.observable_stride == 0) {
      print_observables(std::cout, engine.observe());
    }
  }
  if (timing) timing->finish(cfg.engine.steps, engine.timers());

  const SectionTimers& t = engine.timers();
  std::cerr << std::setprecision(6) << "completed " << engine.step_count()
            << " steps in " << t.elapsed << " s (";
  for (std::size_t i = 0; i < kSectionCount; ++i) {
    std::cerr << section_name(static_cast<Section>(i)) << ' ' << t.seconds[i]
              << (i + 1 < kSectionCount ? ", " : "");
  }
  std::cerr << "); " << engine.rebuild_count() << " list rebuilds, "
            << engine.steal_count() << " steals\n";
}

int cmd_run(const CommonFlags& flags) {
  RunConfig cfg = load_config(flags);
  ensure_out_dir(flags.out_dir);
  const FlatConfig flat = generate_system(cfg);
  cfg.engine.n_sub = resolve_n_sub(cfg, flat);
  run_engine(cfg, flat, flags.out_dir);
  return kExitOk;
}

int cmd_autotune(const CommonFlags& flags) {
  RunConfig cfg = load_config(flags);
  ensure_out_dir(flags.out_dir);
  const FlatConfig flat = generate_system(cfg);

  const AutotuneReport report = autotune_subnodes(
      flat, cfg.inter, cfg.r_skin, cfg.engine, cfg.probe_steps,
      cfg.full_sweep);

  const std::string csv_path = out_path(flags.out_dir, "autotune.csv");
  std::ofstream csv(csv_path);
  if (!csv) throw ConfigError("cannot open output file: " + csv_path);
  write_autotune_csv(csv, report);

  std::cerr << std::setprecision(6);
  for (const AutotuneProbe& p : report.probes) {
    std::cerr << "n_sub " << std::setw(8) << p.n_sub << "  " << p.seconds
              << " s" << (p.n_sub == report.selected ? "  <- selected" : "")
              << '\n';
  }
  std::cerr << "wrote " << csv_path
            << (report.exhausted ? " (candidates exhausted)" : "") << '\n';

  if (cfg.engine.steps > 0) {
    cfg.engine.n_sub = report.selected;
    cfg.n_sub_auto = false;
    run_engine(cfg, flat, flags.out_dir);
  }
  return kExitOk;
}

int cmd_generate(const CommonFlags& flags) {
  RunConfig cfg = load_config(flags);
  ensure_out_dir(flags.out_dir);
  const FlatConfig flat = generate_system(cfg);

  const std::string xyz_path = out_path(flags.out_dir, "system.xyz");
  std::ofstream xyz(xyz_path);
  if (!xyz) throw ConfigError("cannot open output file: " + xyz_path);
  write_xyz_frame(xyz, flat, 0);

  const std::string cfg_path = out_path(flags.out_dir, "resolved.cfg");
  std::ofstream snap(cfg_path);
  if (!snap) throw ConfigError("cannot open output file: " + cfg_path);
  snap << serialize_run_config(cfg);

  std::cerr << "generated " << flat.size() << " particles, "
            << flat.topo.bonds.size() << " bonds, "
            << flat.topo.angles.size() << " angles in box (" << flat.box.length.x
            << ", " << flat.box.length.y << ", " << flat.box.length.z
            << "); wrote " << xyz_path << " and " << cfg_path << '\n';
  return kExitOk;
}

constexpr std::size_t kVerifyCap = 5000;
constexpr double kVerifyTolerance = 1e-10;

int cmd_verify(const CommonFlags& flags) {
  RunConfig cfg = load_config(flags);
  if (cfg.engine.thermostat) {
    std::cerr << "verify compares conservative forces; ignoring the "
                 "configured thermostat\n";
    cfg.engine.thermostat.reset();
  }

  const FlatConfig flat = generate_system(cfg);
  if (flat.size() > kVerifyCap) {
    throw ConfigError("verify runs an O(N^2) reference and is capped at " +
                      std::to_string(kVerifyCap) + " particles; this config "
                      "generates " + std::to_string(flat.size()));
  }
  if (cfg.n_sub_auto) {
    cfg.engine.n_sub = 1;
    std::cerr << "engine.n_sub = auto resolves to 1 for verification\n";
  }

  Domain domain = build_domain(flat, cfg.inter, cfg.r_skin, cfg.engine.n_sub);
  EngineConfig ecfg = cfg.engine;
  ecfg.steps = 0;
  const Engine engine(std::move(domain), ecfg);
  const Domain& d = engine.domain();

  std::map<std::int64_t, Vec3> engine_force;
  std::vector<std::pair<std::int64_t, std::int64_t>> engine_pairs;
  for (int s = 0; s < d.n_sub(); ++s) {
    const Subnode& sn = d.subs[s];
    for (std::int32_t c : sn.interior) {
      const CellSpan& span = sn.store.cells[c];
      for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
        engine_force[sn.store.id[k]] = sn.store.force(k);
      }
    }
    const SortedNeighborList& list = d.nlists[s];
    for (std::size_t r = 0; r < list.ilist.size(); ++r) {
      const std::int64_t a = sn.store.id[list.ilist[r]];
      for (std::int32_t idx = list.irange[r].first;
           idx < list.irange[r].second; ++idx) {
        const std::int64_t b = sn.store.id[list.jlist[idx]];
        if (b == SoaStore::kSentinelId) continue;
        engine_pairs.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  }
  std::sort(engine_pairs.begin(), engine_pairs.end());

  const OracleResult want = oracle_forces_energy(flat, cfg.inter);
  const auto want_pairs =
      oracle_pair_set(flat, cfg.inter.lj.r_cut + cfg.r_skin);

  double max_diff = 0.0;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    const Vec3 got = engine_force.at(flat.id[k]);
    max_diff = std::max(max_diff, std::abs(got.x - want.force[k].x));
    max_diff = std::max(max_diff, std::abs(got.y - want.force[k].y));
    max_diff = std::max(max_diff, std::abs(got.z - want.force[k].z));
  }

  std::vector<std::pair<std::int64_t, std::int64_t>> engine_only;
  std::vector<std::pair<std::int64_t, std::int64_t>> oracle_only;
  std::set_difference(engine_pairs.begin(), engine_pairs.end(),
                      want_pairs.begin(), want_pairs.end(),
                      std::back_inserter(engine_only));
  std::set_difference(want_pairs.begin(), want_pairs.end(),
                      engine_pairs.begin(), engine_pairs.end(),
                      std::back_inserter(oracle_only));

  std::cout << std::setprecision(3) << "N = " << flat.size() << ", n_sub = "
            << cfg.engine.n_sub << ", " << engine_pairs.size()
            << " listed pairs\n"
            << "max |dF| = " << max_diff << " (tolerance " << kVerifyTolerance
            << ")\n";
  if (engine_only.empty() && oracle_only.empty()) {
    std::cout << "pair sets equal\n";
  } else {
    std::cout << "pair sets differ: " << engine_only.size()
              << " listed only by the engine, " << oracle_only.size()
              << " only by the reference\n";
    const auto show = [](const char* label, const auto& pairs) {
      for (std::size_t k = 0; k < pairs.size() && k < 5; ++k) {
        std::cout << "  " << label << " (" << pairs[k].first << ", "
                  << pairs[k].second << ")\n";
      }
    };
    show("engine", engine_only);
    show("reference", oracle_only);
  }
  std::cout << std::setprecision(17) << "engine potential = "
            << engine.potential_energy() << ", reference potential = "
            << want.potential() << '\n';

  if (max_diff > kVerifyTolerance) {
    throw VerifyError("force mismatch: max |dF| = " +
                      std::to_string(max_diff));
  }
  if (!engine_only.empty() || !oracle_only.empty()) {
    throw VerifyError("pair set mismatch");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"short-range molecular dynamics with task-parallel subnodes"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "simulate a configured system");
  add_common_flags(run, run_flags);

  CommonFlags tune_flags;
  CLI::App* tune = app.add_subcommand(
      "autotune", "probe subnode counts, then run at the best one");
  add_common_flags(tune, tune_flags);

  CommonFlags gen_flags;
  CLI::App* gen = app.add_subcommand(
      "generate", "write the initial system and the resolved config");
  add_common_flags(gen, gen_flags);

  CommonFlags verify_flags;
  CLI::App* verify = app.add_subcommand(
      "verify", "check one force evaluation against the brute-force reference");
  add_common_flags(verify, verify_flags);

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(run_flags);
    if (tune->parsed()) return cmd_autotune(tune_flags);
    if (gen->parsed()) return cmd_generate(gen_flags);
    if (verify->parsed()) return cmd_verify(verify_flags);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << '\n';
    return kExitPhysicsError;
  } catch (const VerifyError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kExitVerifyMismatch;
  }
}
