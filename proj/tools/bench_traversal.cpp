#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <vector>

#include "taskmd/domain.hpp"
#include "taskmd/engine.hpp"
#include "taskmd/generators.hpp"
#include "taskmd/timers.hpp"

using namespace taskmd;

namespace {

void zero_forces(SoaStore& store) {
  std::fill(store.fx.begin(), store.fx.end(), 0.0);
  std::fill(store.fy.begin(), store.fy.end(), 0.0);
  std::fill(store.fz.begin(), store.fz.end(), 0.0);
}

struct Sample {
  double mean = 0.0;
  double best = 0.0;
  double energy = 0.0;
};

template <typename Loop>
Sample time_traversal(SoaStore& store, int reps, Loop&& loop) {
  Sample s;
  zero_forces(store);
  s.energy = loop();
  std::vector<double> seconds;
  seconds.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    zero_forces(store);
    Stopwatch w;
    loop();
    seconds.push_back(w.seconds());
  }
  for (double t : seconds) s.mean += t;
  s.mean /= static_cast<double>(reps);
  s.best = *std::min_element(seconds.begin(), seconds.end());
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "force-loop timing: sorted neighbor runs vs an explicit pair list"};
  int n = 16384;
  int reps = 25;
  int equilibration_steps = 100;
  std::uint64_t seed = 7;
  double rho = 0.8442;
  double temperature = 0.72;
  app.add_option("--n", n, "particle count");
  app.add_option("--reps", reps, "timed repetitions per traversal");
  app.add_option("--equil", equilibration_steps,
                 "NVE steps before timing, to decorrelate the lattice");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--rho", rho, "number density");
  app.add_option("--temperature", temperature, "initial temperature");
  CLI11_PARSE(app, argc, argv);

  Interactions inter;
  inter.lj = LjParams{1.0, 1.0, 2.5, true};
  const double r_skin = 0.3;

  FlatConfig flat = gen_lattice(n, rho, temperature, seed);
  {
    EngineConfig warm;
    warm.dt = 0.005;
    Domain d = build_domain(flat, inter, r_skin, 1);
    Engine eng(std::move(d), warm);
    eng.run(equilibration_steps);
    flat = flatten_domain(eng.domain());
  }

  Domain domain = build_domain(flat, inter, r_skin, 1);
  Subnode& sub = domain.subs[0];
  const SortedNeighborList& sorted = domain.nlists[0];
  const PairIndexList indexed =
      build_pair_index_list(sub, inter.lj.r_cut + r_skin);

  std::size_t sorted_pairs = 0;
  for (std::int32_t j : sorted.jlist) {
    if (sub.store.id[j] != SoaStore::kSentinelId) sorted_pairs += 1;
  }

  const Sample runs = time_traversal(sub.store, reps, [&] {
    return compute_pair_forces(domain.nlists[0], sub.store, domain.lj_prep);
  });
  const Sample pairs = time_traversal(sub.store, reps, [&] {
    return compute_pair_forces(indexed, sub.store, domain.lj_prep);
  });

  std::cout << "N = " << n << ", rho = " << rho << ", " << sorted_pairs
            << " candidate pairs ("
            << static_cast<double>(sorted_pairs) / n
            << " per particle), " << reps << " reps\n"
            << std::setprecision(6)
            << "sorted runs   mean " << runs.mean * 1e3 << " ms, best "
            << runs.best * 1e3 << " ms\n"
            << "pair list     mean " << pairs.mean * 1e3 << " ms, best "
            << pairs.best * 1e3 << " ms\n"
            << "best-time ratio (pair list / sorted runs) = "
            << pairs.best / runs.best << '\n';

  const double energy_gap = std::abs(runs.energy - pairs.energy);
  std::cout << std::setprecision(3) << "energy agreement |dU| = "
            << energy_gap << '\n';
  if (indexed.pairs.size() != sorted_pairs ||
      energy_gap > 1e-9 * std::abs(runs.energy)) {
    std::cerr << "traversals disagree: " << sorted_pairs << " vs "
              << indexed.pairs.size() << " pairs\n";
    return 1;
  }
  return 0;
}
