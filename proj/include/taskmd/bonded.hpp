#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "taskmd/potentials.hpp"
#include "taskmd/subnode.hpp"
#include "taskmd/topology.hpp"

namespace taskmd {

// Bonded terms with particle ids resolved to local store slots. A bond is
// computed by the subnode owning its first particle, an angle by the owner
// of its middle particle; the partners are then reachable inside that
// subnode's store because bonded neighbors sit within one cell length
// (enforced by the r_max <= r_cut + r_skin setup check). Slots go stale at
// every resort, so terms are re-resolved there.
struct BondTerm {
  std::int32_t a_slot = 0;
  std::int32_t b_slot = 0;
  std::int64_t a_id = 0;
  std::int64_t b_id = 0;
};

struct AngleTerm {
  std::int32_t i_slot = 0;
  std::int32_t j_slot = 0;
  std::int32_t k_slot = 0;
  std::int64_t i_id = 0;
  std::int64_t j_id = 0;
  std::int64_t k_id = 0;
};

struct BondedTerms {
  std::vector<BondTerm> bonds;
  std::vector<AngleTerm> angles;
};

namespace detail {

// A partner id can appear several times in one subnode: the real slot and
// up to seven periodic ghost images. The physical partner is the image
// closest to the anchor particle; bonds are far shorter than a cell, so
// the closest image is unique.
inline std::int32_t closest_slot(const SoaStore& s,
                                 const std::vector<std::int32_t>& candidates,
                                 const Vec3& anchor, std::int64_t id,
                                 std::int64_t anchor_id) {
  if (candidates.empty()) {
    throw PhysicsError("bonded partner id " + std::to_string(id) +
                       " is out of reach of particle id " +
                       std::to_string(anchor_id) +
                       " (bond stretched beyond the ghost shell)");
  }
  std::int32_t best = candidates[0];
  double best_d2 = 1e300;
  for (std::int32_t slot : candidates) {
    const double dx = anchor.x - s.px[slot];
    const double dy = anchor.y - s.py[slot];
    const double dz = anchor.z - s.pz[slot];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = slot;
    }
  }
  return best;
}

}  // namespace detail

// Assigns every bond and angle to its owning subnode and resolves ids to
// slots. Called after each (re)distribution, while ghost data is current.
inline std::vector<BondedTerms> resolve_bonded(const Topology& topo,
                                               std::vector<Subnode>& subs) {
  std::vector<BondedTerms> terms(subs.size());
  if (topo.empty()) return terms;

  // Interior owner of each id.
  struct Owner {
    std::int32_t sub;
    std::int32_t slot;
  };
  std::unordered_map<std::int64_t, Owner> owner;
  for (const Subnode& sn : subs) {
    for (std::int32_t c : sn.interior) {
      const CellSpan& span = sn.store.cells[c];
      for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
        owner[sn.store.id[k]] = {static_cast<std::int32_t>(sn.index),
                                 static_cast<std::int32_t>(k)};
      }
    }
  }

  // All slots (real and ghost) carrying each id, per subnode; built only
  // for subnodes that own bonded terms.
  std::vector<std::unordered_map<std::int64_t, std::vector<std::int32_t>>>
      slots(subs.size());
  auto slots_of = [&](int sub) -> const std::unordered_map<
                                   std::int64_t, std::vector<std::int32_t>>& {
    auto& m = slots[sub];
    if (m.empty()) {
      const SoaStore& s = subs[sub].store;
      for (const CellSpan& span : s.cells) {
        for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
          m[s.id[k]].push_back(static_cast<std::int32_t>(k));
        }
      }
    }
    return m;
  };

  auto owner_of = [&](std::int64_t id) -> const Owner& {
    const auto it = owner.find(id);
    if (it == owner.end()) {
      throw StateError("bonded term references id " + std::to_string(id) +
                       " which no subnode owns");
    }
    return it->second;
  };

  for (const Bond& b : topo.bonds) {
    const Owner& oa = owner_of(b.a);
    const SoaStore& s = subs[oa.sub].store;
    const Vec3 anchor = s.position(oa.slot);
    const auto& m = slots_of(oa.sub);
    const auto it = m.find(b.b);
    static const std::vector<std::int32_t> kNone;
    const auto& cand = it == m.end() ? kNone : it->second;
    BondTerm t;
    t.a_slot = oa.slot;
    t.b_slot = detail::closest_slot(s, cand, anchor, b.b, b.a);
    t.a_id = b.a;
    t.b_id = b.b;
    terms[oa.sub].bonds.push_back(t);
  }

  for (const Angle& a : topo.angles) {
    const Owner& oj = owner_of(a.j);
    const SoaStore& s = subs[oj.sub].store;
    const Vec3 anchor = s.position(oj.slot);
    const auto& m = slots_of(oj.sub);
    static const std::vector<std::int32_t> kNone;
    const auto iti = m.find(a.i);
    const auto itk = m.find(a.k);
    AngleTerm t;
    t.j_slot = oj.slot;
    t.i_slot = detail::closest_slot(s, iti == m.end() ? kNone : iti->second,
                                    anchor, a.i, a.j);
    t.k_slot = detail::closest_slot(s, itk == m.end() ? kNone : itk->second,
                                    anchor, a.k, a.j);
    t.i_id = a.i;
    t.j_id = a.j;
    t.k_id = a.k;
    terms[oj.sub].angles.push_back(t);
  }
  return terms;
}

// Evaluates this subnode's bonds and angles, accumulating forces in place
// (partners may be ghost slots; their forces are collected by the owners).
// Returns the bonded potential energy of the terms computed here.
inline double compute_bonded_forces(Subnode& sn, const BondedTerms& terms,
                                    const std::optional<FeneParams>& fene,
                                    const std::optional<AngleParams>& angle) {
  SoaStore& s = sn.store;
  double energy = 0.0;

  if (!terms.bonds.empty() && !fene.has_value()) {
    throw StateError("bonds present but no bond parameters configured");
  }
  for (const BondTerm& t : terms.bonds) {
    const double dx = s.px[t.a_slot] - s.px[t.b_slot];
    const double dy = s.py[t.a_slot] - s.py[t.b_slot];
    const double dz = s.pz[t.a_slot] - s.pz[t.b_slot];
    const double r2 = dx * dx + dy * dy + dz * dz;
    const double rmax2 = fene->r_max * fene->r_max;
    if (r2 >= rmax2) {
      throw PhysicsError("fene bond overstretched between ids " +
                         std::to_string(t.a_id) + " and " +
                         std::to_string(t.b_id) + ": r = " +
                         std::to_string(std::sqrt(r2)) +
                         " >= r_max = " + std::to_string(fene->r_max));
    }
    const PairTerm pt = fene_eval(r2, *fene);
    energy += pt.energy;
    s.fx[t.a_slot] += pt.force_factor * dx;
    s.fy[t.a_slot] += pt.force_factor * dy;
    s.fz[t.a_slot] += pt.force_factor * dz;
    s.fx[t.b_slot] -= pt.force_factor * dx;
    s.fy[t.b_slot] -= pt.force_factor * dy;
    s.fz[t.b_slot] -= pt.force_factor * dz;
  }

  if (!terms.angles.empty() && !angle.has_value()) {
    throw StateError("angles present but no angle parameters configured");
  }
  for (const AngleTerm& t : terms.angles) {
    const Vec3 u = s.position(t.i_slot) - s.position(t.j_slot);
    const Vec3 v = s.position(t.k_slot) - s.position(t.j_slot);
    AngleEval e;
    try {
      e = angle_eval(u, v, *angle);
    } catch (const PhysicsError& err) {
      throw PhysicsError(std::string(err.what()) + " (angle ids " +
                         std::to_string(t.i_id) + ", " +
                         std::to_string(t.j_id) + ", " +
                         std::to_string(t.k_id) + ")");
    }
    energy += e.energy;
    s.fx[t.i_slot] += e.f_i.x;
    s.fy[t.i_slot] += e.f_i.y;
    s.fz[t.i_slot] += e.f_i.z;
    s.fx[t.j_slot] += e.f_j.x;
    s.fy[t.j_slot] += e.f_j.y;
    s.fz[t.j_slot] += e.f_j.z;
    s.fx[t.k_slot] += e.f_k.x;
    s.fy[t.k_slot] += e.f_k.y;
    s.fz[t.k_slot] += e.f_k.z;
  }
  return energy;
}

}  // namespace taskmd
