#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "taskmd/bonded.hpp"
#include "taskmd/decomp.hpp"
#include "taskmd/flat_config.hpp"
#include "taskmd/neighbor_list.hpp"

namespace taskmd {

// Everything acting between particles. The pair interaction is always on;
// bonds and angles are optional and must be configured when the topology
// uses them.
struct Interactions {
  LjParams lj;
  std::optional<FeneParams> fene;
  std::optional<AngleParams> angle;
};

// The decomposed simulation state: the cell grid split into subnodes, each
// with its own particle store, neighbor list, and rebuild snapshot, plus
// the ghost exchange plan tying them together.
struct Domain {
  BoxSpec box;
  double r_skin = 0.0;
  Interactions inter;
  LjPrepared lj_prep;

  CellGrid grid;
  SubnodeGrid part;
  std::vector<Subnode> subs;
  GhostCommPlan plan;

  Topology topo;
  std::vector<BondedTerms> terms;

  std::vector<SortedNeighborList> nlists;
  std::vector<RebuildSnapshot> snaps;

  std::size_t n_particles = 0;

  int n_sub() const { return static_cast<int>(subs.size()); }
};

// Bins records into subnode stores: every interior cell is filled by its
// owner, every ghost cell gets a shifted copy from the cell it mirrors
// (ghost velocities stay zero; only positions and identity matter there).
// Rebuilds each store from scratch, so all slot indices become stale.
inline void distribute_records(Domain& d,
                               const std::vector<ParticleRec>& recs) {
  std::vector<std::vector<ParticleRec>> buckets(d.grid.ncells());
  for (ParticleRec rec : recs) {
    if (!std::isfinite(rec.pos.x) || !std::isfinite(rec.pos.y) ||
        !std::isfinite(rec.pos.z)) {
      throw PhysicsError("non-finite position for particle id " +
                         std::to_string(rec.id));
    }
    rec.pos = wrap_position(rec.pos, d.box);
    buckets[d.grid.cell_of(rec.pos)].push_back(rec);
  }

  std::size_t placed = 0;
  for (Subnode& sn : d.subs) {
    std::vector<std::vector<ParticleRec>> by_cell(sn.lcells());
    for (int l = 0; l < sn.lcells(); ++l) {
      const auto& src = buckets[sn.local_to_global[l]];
      if (sn.ghost[l]) {
        for (ParticleRec rec : src) {
          rec.pos += sn.shift[l];
          rec.vel = {0.0, 0.0, 0.0};
          by_cell[l].push_back(rec);
        }
      } else {
        by_cell[l] = src;
        placed += src.size();
      }
    }
    sn.store = SoaStore::build(by_cell);
  }

  if (placed != recs.size()) {
    throw StateError("distribution lost particles: placed " +
                     std::to_string(placed) + " of " +
                     std::to_string(recs.size()));
  }
  d.n_particles = recs.size();
}

// Collects every owned particle in a fixed order (subnode index, then
// interior cell order, then slot order), making gather/distribute round
// trips and anything built on them deterministic.
inline std::vector<ParticleRec> gather_records(const Domain& d) {
  std::vector<ParticleRec> recs;
  recs.reserve(d.n_particles);
  for (const Subnode& sn : d.subs) {
    for (std::int32_t c : sn.interior) {
      const CellSpan& span = sn.store.cells[c];
      for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
        recs.push_back(sn.store.record(k));
      }
    }
  }
  return recs;
}

// Re-bins all particles into their current cells and re-resolves bonded
// terms against the new slots. Neighbor lists are NOT rebuilt here; that
// stays with the caller so it can run per subnode in parallel.
inline void resort_domain(Domain& d) {
  distribute_records(d, gather_records(d));
  d.terms = resolve_bonded(d.topo, d.subs);
}

// Builds the neighbor list and rebuild snapshot of one subnode. Ghost
// positions must be current.
inline void rebuild_subnode_list(Domain& d, int sub) {
  auto built = build_sorted_list(d.subs[sub], d.grid.r_verlet);
  d.nlists[sub] = std::move(built.first);
  d.snaps[sub] = std::move(built.second);
}

inline void rebuild_all_lists(Domain& d) {
  for (int s = 0; s < d.n_sub(); ++s) rebuild_subnode_list(d, s);
}

// Assembles a ready-to-step domain from a flat snapshot: validates the
// configuration, builds grid / decomposition / ghost plan, distributes
// particles, resolves bonded terms, and builds all neighbor lists.
inline Domain build_domain(const FlatConfig& cfg, const Interactions& inter,
                           double r_skin, int n_sub) {
  validate_flat(cfg);
  validate_lj(inter.lj);
  if (inter.fene) validate_fene(*inter.fene);
  if (inter.angle) validate_angle(*inter.angle);
  if (!std::isfinite(r_skin) || r_skin < 0.0) {
    throw ConfigError("skin radius must be finite and non-negative");
  }

  if (!cfg.topo.bonds.empty() && !inter.fene) {
    throw ConfigError("topology has bonds but no bond parameters configured");
  }
  if (!cfg.topo.angles.empty() && !inter.angle) {
    throw ConfigError(
        "topology has angles but no angle parameters configured");
  }
  // Bonded partners must never leave the one-cell ghost shell, else their
  // slots become unreachable between resorts. Cells are at least
  // r_cut + r_skin wide, and bonds cannot stretch past r_max.
  if (!cfg.topo.bonds.empty() &&
      inter.fene->r_max > inter.lj.r_cut + r_skin) {
    throw ConfigError(
        "bond r_max exceeds r_cut + r_skin; bonded partners could leave "
        "the ghost shell");
  }

  // Sentinel coordinates must stay far outside any reachable position.
  const double max_len =
      std::max({cfg.box.length.x, cfg.box.length.y, cfg.box.length.z});
  if (max_len > 0.1 * SoaStore::kSentinelCoord) {
    throw ConfigError("box too large: positions could alias the padding "
                      "sentinel coordinate");
  }

  Domain d;
  d.box = cfg.box;
  d.r_skin = r_skin;
  d.inter = inter;
  d.lj_prep = lj_prepare(inter.lj);
  d.grid = build_cell_grid(cfg.box, inter.lj.r_cut, r_skin);
  d.part = make_subnode_decomposition(d.grid, n_sub);
  d.subs = make_subnode_layouts(d.grid, d.part);
  d.plan = build_ghost_plan(d.grid, d.part, d.subs);
  d.topo = cfg.topo;
  d.nlists.resize(d.subs.size());
  d.snaps.resize(d.subs.size());

  std::vector<ParticleRec> recs;
  recs.reserve(cfg.size());
  for (std::size_t k = 0; k < cfg.size(); ++k) recs.push_back(cfg.record(k));
  distribute_records(d, recs);
  d.terms = resolve_bonded(d.topo, d.subs);
  rebuild_all_lists(d);
  return d;
}

// Flattens the domain back into a snapshot sorted by particle id, with
// positions wrapped into the box.
inline FlatConfig flatten_domain(const Domain& d) {
  std::vector<ParticleRec> recs = gather_records(d);
  std::sort(recs.begin(), recs.end(),
            [](const ParticleRec& a, const ParticleRec& b) {
              return a.id < b.id;
            });
  FlatConfig f;
  f.box = d.box;
  f.topo = d.topo;
  for (ParticleRec& rec : recs) {
    rec.pos = wrap_position(rec.pos, d.box);
    f.push(rec);
  }
  return f;
}

// Kinetic energy and temperature over all owned particles.
inline KineticResult domain_kinetic(const Domain& d) {
  KineticResult r;
  for (const Subnode& sn : d.subs) {
    std::vector<std::size_t> cells(sn.interior.begin(), sn.interior.end());
    const KineticResult part = kinetic_energy(sn.store, cells);
    r.kinetic += part.kinetic;
    r.count += part.count;
  }
  return r;
}

}  // namespace taskmd
