#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "taskmd/potentials.hpp"
#include "taskmd/subnode.hpp"

namespace taskmd {

// Verlet list in sorted layout: all partners of ilist[n] sit in
// jlist[irange[n].first, irange[n].second). Runs are padded up to the store
// chunk size with slots pointing at the store's sentinel block, so the inner
// force loop has no tail; sentinels fail the cutoff test by construction.
// Entries are local store slots; j may be a ghost slot.
struct SortedNeighborList {
  std::vector<std::int32_t> ilist;
  std::vector<std::pair<std::int32_t, std::int32_t>> irange;
  std::vector<std::int32_t> jlist;
};

// Interior positions at the moment the list was built, in traversal order.
struct RebuildSnapshot {
  std::vector<double> x, y, z;
};

// The 13 offsets enumerating each adjacent cell pair exactly once: the first
// nonzero component is positive. Together with same-cell pairs (a < b) and
// interior-only i cells, every unordered pair (and each of its periodic
// images, in degenerate one-cell-wide grids) appears exactly once across all
// subnodes.
inline const std::array<std::array<int, 3>, 13>& half_stencil() {
  static const std::array<std::array<int, 3>, 13> s = {{
      {{1, -1, -1}}, {{1, 0, -1}}, {{1, 1, -1}},
      {{1, -1, 0}},  {{1, 0, 0}},  {{1, 1, 0}},
      {{1, -1, 1}},  {{1, 0, 1}},  {{1, 1, 1}},
      {{0, 1, -1}},  {{0, 1, 0}},  {{0, 1, 1}},
      {{0, 0, 1}},
  }};
  return s;
}

// Builds the half list for one subnode. Ghost positions must be current.
// Pairs are kept at squared distance <= r_verlet^2. When a stencil target
// wraps onto the source cell itself (grids one cell wide), a particle would
// meet its own periodic image; those self pairs are skipped, which is safe
// because the image distance is at least one box length >= r_verlet.
inline std::pair<SortedNeighborList, RebuildSnapshot> build_sorted_list(
    const Subnode& sn, double r_verlet) {
  SortedNeighborList out;
  RebuildSnapshot snap;
  const SoaStore& s = sn.store;
  const double rv2 = r_verlet * r_verlet;
  const auto& stencil = half_stencil();
  const std::int32_t sentinel = static_cast<std::int32_t>(s.sentinel_begin);

  const std::size_t nreal = sn.real_count();
  out.ilist.reserve(nreal);
  out.irange.reserve(nreal);
  out.jlist.reserve(nreal * 48);
  snap.x.reserve(nreal);
  snap.y.reserve(nreal);
  snap.z.reserve(nreal);

  for (std::int32_t c : sn.interior) {
    const CellSpan& span = s.cells[c];
    const int cx = c % sn.ldims[0];
    const int cy = (c / sn.ldims[0]) % sn.ldims[1];
    const int cz = c / (sn.ldims[0] * sn.ldims[1]);

    for (std::size_t a = span.begin; a < span.begin + span.real; ++a) {
      const double ax = s.px[a], ay = s.py[a], az = s.pz[a];
      snap.x.push_back(ax);
      snap.y.push_back(ay);
      snap.z.push_back(az);
      const std::size_t run_start = out.jlist.size();

      for (std::size_t b = a + 1; b < span.begin + span.real; ++b) {
        const double dx = ax - s.px[b], dy = ay - s.py[b], dz = az - s.pz[b];
        if (dx * dx + dy * dy + dz * dz <= rv2) {
          out.jlist.push_back(static_cast<std::int32_t>(b));
        }
      }

      for (const auto& off : stencil) {
        const int d = sn.llinear(cx + off[0], cy + off[1], cz + off[2]);
        const CellSpan& dspan = s.cells[d];
        const bool same_source = sn.local_to_global[d] == sn.local_to_global[c];
        for (std::size_t b = dspan.begin; b < dspan.begin + dspan.real; ++b) {
          if (same_source && s.id[b] == s.id[a]) continue;
          const double dx = ax - s.px[b], dy = ay - s.py[b], dz = az - s.pz[b];
          if (dx * dx + dy * dy + dz * dz <= rv2) {
            out.jlist.push_back(static_cast<std::int32_t>(b));
          }
        }
      }

      if (out.jlist.size() == run_start) continue;
      while ((out.jlist.size() - run_start) % SoaStore::kChunk != 0) {
        out.jlist.push_back(sentinel);
      }
      out.ilist.push_back(static_cast<std::int32_t>(a));
      out.irange.emplace_back(static_cast<std::int32_t>(run_start),
                              static_cast<std::int32_t>(out.jlist.size()));
    }
  }
  return {std::move(out), std::move(snap)};
}

// Largest squared displacement of any interior particle since the snapshot.
inline double max_displacement2(const Subnode& sn, const RebuildSnapshot& snap) {
  const SoaStore& s = sn.store;
  double best = 0.0;
  std::size_t n = 0;
  for (std::int32_t c : sn.interior) {
    const CellSpan& span = s.cells[c];
    for (std::size_t k = span.begin; k < span.begin + span.real; ++k, ++n) {
      if (n >= snap.x.size()) {
        throw StateError("stale snapshot: store holds more particles than "
                         "the snapshot");
      }
      const double dx = s.px[k] - snap.x[n];
      const double dy = s.py[k] - snap.y[n];
      const double dz = s.pz[k] - snap.z[n];
      const double d2 = dx * dx + dy * dy + dz * dz;
      if (d2 > best) best = d2;
    }
  }
  if (n != snap.x.size()) {
    throw StateError("stale snapshot: particle count changed since build");
  }
  return best;
}

// True once any particle has moved further than half the skin, at which
// point a pair just outside the Verlet radius could have closed to the
// cutoff. Strict inequality: moving exactly r_skin/2 is still safe.
inline bool needs_rebuild(const Subnode& sn, const RebuildSnapshot& snap,
                          double r_skin) {
  return max_displacement2(sn, snap) > 0.25 * r_skin * r_skin;
}

// Traverses the sorted list and accumulates forces with Newton's third law;
// j slots may be ghosts whose forces are collected by their owners later.
// Displacements are plain differences: ghost copies are pre-shifted.
// Returns the summed pair energy, counting each pair once.
inline double compute_pair_forces(const SortedNeighborList& list, SoaStore& s,
                                  const LjPrepared& lj) {
  double energy = 0.0;
  for (std::size_t n = 0; n < list.ilist.size(); ++n) {
    const std::size_t a = static_cast<std::size_t>(list.ilist[n]);
    const double ax = s.px[a], ay = s.py[a], az = s.pz[a];
    double fax = 0.0, fay = 0.0, faz = 0.0;
    const std::int32_t jb = list.irange[n].first;
    const std::int32_t je = list.irange[n].second;
    for (std::int32_t jj = jb; jj < je; ++jj) {
      const std::size_t b = static_cast<std::size_t>(list.jlist[jj]);
      const double dx = ax - s.px[b];
      const double dy = ay - s.py[b];
      const double dz = az - s.pz[b];
      const double r2 = dx * dx + dy * dy + dz * dz;
      if (r2 >= lj.rc2) continue;
      if (r2 == 0.0) {
        throw PhysicsError("overlapping particles: ids " +
                           std::to_string(s.id[a]) + " and " +
                           std::to_string(s.id[b]) + " coincide");
      }
      const double inv = lj.sigma2 / r2;
      const double i6 = inv * inv * inv;
      const double ff = lj.eps24 * (2.0 * i6 * i6 - i6) / r2;
      energy += lj.eps4 * (i6 * i6 - i6) - lj.shift;
      fax += ff * dx;
      fay += ff * dy;
      faz += ff * dz;
      s.fx[b] -= ff * dx;
      s.fy[b] -= ff * dy;
      s.fz[b] -= ff * dz;
    }
    s.fx[a] += fax;
    s.fy[a] += fay;
    s.fz[a] += faz;
  }
  return energy;
}

// Classical Verlet list: one explicit (i, j) slot pair per candidate pair,
// enumerated by the same traversal as the sorted layout. Functionally
// interchangeable with it; kept as the baseline that the traversal
// microbenchmark compares the sorted layout against.
struct PairIndexList {
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
};

inline PairIndexList build_pair_index_list(const Subnode& sn,
                                           double r_verlet) {
  PairIndexList out;
  const SoaStore& s = sn.store;
  const double rv2 = r_verlet * r_verlet;
  const auto& stencil = half_stencil();

  for (std::int32_t c : sn.interior) {
    const CellSpan& span = s.cells[c];
    const int cx = c % sn.ldims[0];
    const int cy = (c / sn.ldims[0]) % sn.ldims[1];
    const int cz = c / (sn.ldims[0] * sn.ldims[1]);

    for (std::size_t a = span.begin; a < span.begin + span.real; ++a) {
      const double ax = s.px[a], ay = s.py[a], az = s.pz[a];

      for (std::size_t b = a + 1; b < span.begin + span.real; ++b) {
        const double dx = ax - s.px[b], dy = ay - s.py[b], dz = az - s.pz[b];
        if (dx * dx + dy * dy + dz * dz <= rv2) {
          out.pairs.emplace_back(static_cast<std::int32_t>(a),
                                 static_cast<std::int32_t>(b));
        }
      }

      for (const auto& off : stencil) {
        const int d = sn.llinear(cx + off[0], cy + off[1], cz + off[2]);
        const CellSpan& dspan = s.cells[d];
        const bool same_source =
            sn.local_to_global[d] == sn.local_to_global[c];
        for (std::size_t b = dspan.begin; b < dspan.begin + dspan.real; ++b) {
          if (same_source && s.id[b] == s.id[a]) continue;
          const double dx = ax - s.px[b], dy = ay - s.py[b], dz = az - s.pz[b];
          if (dx * dx + dy * dy + dz * dz <= rv2) {
            out.pairs.emplace_back(static_cast<std::int32_t>(a),
                                   static_cast<std::int32_t>(b));
          }
        }
      }
    }
  }
  return out;
}

inline double compute_pair_forces(const PairIndexList& list, SoaStore& s,
                                  const LjPrepared& lj) {
  double energy = 0.0;
  for (const auto& [ia, ib] : list.pairs) {
    const std::size_t a = static_cast<std::size_t>(ia);
    const std::size_t b = static_cast<std::size_t>(ib);
    const double dx = s.px[a] - s.px[b];
    const double dy = s.py[a] - s.py[b];
    const double dz = s.pz[a] - s.pz[b];
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 >= lj.rc2) continue;
    if (r2 == 0.0) {
      throw PhysicsError("overlapping particles: ids " +
                         std::to_string(s.id[a]) + " and " +
                         std::to_string(s.id[b]) + " coincide");
    }
    const double inv = lj.sigma2 / r2;
    const double i6 = inv * inv * inv;
    const double ff = lj.eps24 * (2.0 * i6 * i6 - i6) / r2;
    energy += lj.eps4 * (i6 * i6 - i6) - lj.shift;
    s.fx[a] += ff * dx;
    s.fy[a] += ff * dy;
    s.fz[a] += ff * dz;
    s.fx[b] -= ff * dx;
    s.fy[b] -= ff * dy;
    s.fz[b] -= ff * dz;
  }
  return energy;
}

}  // namespace taskmd
