#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "taskmd/cell_grid.hpp"
#include "taskmd/subnode.hpp"

namespace taskmd {

// Partition of the cell grid into n_sub rectangular subnode ranges, split
// as evenly as possible along each axis.
struct SubnodeGrid {
  std::array<int, 3> sub_dims{1, 1, 1};
  // starts[k] has sub_dims[k]+1 entries; slab i along axis k owns cells
  // [starts[k][i], starts[k][i+1]).
  std::array<std::vector<int>, 3> starts;
  // cell_to_sub[k][cell] = slab index along axis k.
  std::array<std::vector<int>, 3> cell_to_sub;

  int n_sub() const { return sub_dims[0] * sub_dims[1] * sub_dims[2]; }

  int sub_linear(int sx, int sy, int sz) const {
    return sx + sub_dims[0] * (sy + sub_dims[1] * sz);
  }

  int owner_of_cell(int cx, int cy, int cz) const {
    return sub_linear(cell_to_sub[0][cx], cell_to_sub[1][cy],
                      cell_to_sub[2][cz]);
  }

  std::array<int, 3> range_lo(int sx, int sy, int sz) const {
    return {starts[0][sx], starts[1][sy], starts[2][sz]};
  }
  std::array<int, 3> range_hi(int sx, int sy, int sz) const {
    return {starts[0][sx + 1], starts[1][sy + 1], starts[2][sz + 1]};
  }
};

// Chooses sub_dims as the factorization of n_sub minimizing the
// surface-to-volume ratio of the average range (1/a + 1/b + 1/c for range
// extents a, b, c), so ghost overhead per subnode is smallest. Exact ties
// take the lexicographically largest factor triple, which splits the
// earliest (and for equal extents the longest) axis hardest.
inline SubnodeGrid make_subnode_decomposition(const CellGrid& grid, int n_sub) {
  if (n_sub < 1) {
    throw ConfigError("n_sub must be >= 1, got " + std::to_string(n_sub));
  }
  if (n_sub > grid.ncells()) {
    throw ConfigError("n_sub = " + std::to_string(n_sub) +
                      " exceeds the cell count " +
                      std::to_string(grid.ncells()));
  }

  std::array<int, 3> best{0, 0, 0};
  double best_cost = 0.0;
  for (int sx = 1; sx <= n_sub; ++sx) {
    if (n_sub % sx != 0 || sx > grid.dims[0]) continue;
    const int rest = n_sub / sx;
    for (int sy = 1; sy <= rest; ++sy) {
      if (rest % sy != 0 || sy > grid.dims[1]) continue;
      const int sz = rest / sy;
      if (sz > grid.dims[2]) continue;
      const double cost = static_cast<double>(sx) / grid.dims[0] +
                          static_cast<double>(sy) / grid.dims[1] +
                          static_cast<double>(sz) / grid.dims[2];
      const std::array<int, 3> cand{sx, sy, sz};
      if (best[0] == 0 || cost < best_cost ||
          (cost == best_cost && cand > best)) {
        best = cand;
        best_cost = cost;
      }
    }
  }
  if (best[0] == 0) {
    throw ConfigError("n_sub = " + std::to_string(n_sub) +
                      " cannot be factored within grid dims (" +
                      std::to_string(grid.dims[0]) + "," +
                      std::to_string(grid.dims[1]) + "," +
                      std::to_string(grid.dims[2]) + ")");
  }

  SubnodeGrid part;
  part.sub_dims = best;
  for (int k = 0; k < 3; ++k) {
    part.starts[k].resize(best[k] + 1);
    for (int i = 0; i <= best[k]; ++i) {
      part.starts[k][i] =
          static_cast<int>(static_cast<std::int64_t>(i) * grid.dims[k] /
                           best[k]);
    }
    part.cell_to_sub[k].resize(grid.dims[k]);
    for (int i = 0; i < best[k]; ++i) {
      for (int c = part.starts[k][i]; c < part.starts[k][i + 1]; ++c) {
        part.cell_to_sub[k][c] = i;
      }
    }
  }
  return part;
}

inline std::vector<Subnode> make_subnode_layouts(const CellGrid& grid,
                                                 const SubnodeGrid& part) {
  std::vector<Subnode> subs;
  subs.reserve(part.n_sub());
  for (int sz = 0; sz < part.sub_dims[2]; ++sz) {
    for (int sy = 0; sy < part.sub_dims[1]; ++sy) {
      for (int sx = 0; sx < part.sub_dims[0]; ++sx) {
        const int idx = part.sub_linear(sx, sy, sz);
        subs.push_back(make_subnode_layout(grid, idx,
                                           part.range_lo(sx, sy, sz),
                                           part.range_hi(sx, sy, sz)));
      }
    }
  }
  return subs;
}

// One ghost-cell copy edge: destination ghost cell dst_cell of subnode
// dst_sub mirrors the real local cell src_cell of subnode src_sub, with
// positions offset by shift when the edge wraps a periodic boundary.
struct GhostRecord {
  std::int32_t src_sub = 0;
  std::int32_t src_cell = 0;
  std::int32_t dst_sub = 0;
  std::int32_t dst_cell = 0;
  Vec3 shift;
};

// The full copy schedule plus per-subnode groupings: by_dst drives the
// position update (one task per destination), by_src drives the force
// collection (one task per source, in fixed record order so accumulation
// is deterministic).
struct GhostCommPlan {
  std::vector<GhostRecord> records;
  std::vector<std::vector<std::int32_t>> by_dst;
  std::vector<std::vector<std::int32_t>> by_src;
};

inline GhostCommPlan build_ghost_plan(const CellGrid& grid,
                                      const SubnodeGrid& part,
                                      const std::vector<Subnode>& subs) {
  GhostCommPlan plan;
  plan.by_dst.resize(subs.size());
  plan.by_src.resize(subs.size());
  for (const Subnode& sn : subs) {
    for (int l = 0; l < sn.lcells(); ++l) {
      if (!sn.ghost[l]) continue;
      const int g = sn.local_to_global[l];
      const auto gc = grid.coords(g);
      const int src_sub = part.owner_of_cell(gc[0], gc[1], gc[2]);
      const int src_cell = subs[src_sub].local_of_owned(gc[0], gc[1], gc[2]);
      GhostRecord rec;
      rec.src_sub = src_sub;
      rec.src_cell = src_cell;
      rec.dst_sub = sn.index;
      rec.dst_cell = l;
      rec.shift = sn.shift[l];
      const std::int32_t ri = static_cast<std::int32_t>(plan.records.size());
      plan.records.push_back(rec);
      plan.by_dst[sn.index].push_back(ri);
      plan.by_src[src_sub].push_back(ri);
    }
  }
  return plan;
}

// Refreshes the ghost cells of one destination subnode: ids, types, and
// shifted positions are copied from each source cell's live entries.
// Masses, velocities (zero), and padding were established when the stores
// were built and cell populations only change at a resort, so a mismatch
// in live counts means the plan is stale.
inline void update_ghost_positions(const GhostCommPlan& plan,
                                   std::vector<Subnode>& subs, int dst_sub) {
  for (std::int32_t ri : plan.by_dst[dst_sub]) {
    const GhostRecord& rec = plan.records[ri];
    const SoaStore& src = subs[rec.src_sub].store;
    SoaStore& dst = subs[rec.dst_sub].store;
    const CellSpan& sc = src.cells[rec.src_cell];
    const CellSpan& dc = dst.cells[rec.dst_cell];
    if (sc.real != dc.real) {
      throw StateError("stale ghost plan: source cell holds " +
                       std::to_string(sc.real) + " particles, ghost copy " +
                       std::to_string(dc.real));
    }
    for (std::size_t k = 0; k < sc.real; ++k) {
      dst.id[dc.begin + k] = src.id[sc.begin + k];
      dst.type[dc.begin + k] = src.type[sc.begin + k];
      dst.px[dc.begin + k] = src.px[sc.begin + k] + rec.shift.x;
      dst.py[dc.begin + k] = src.py[sc.begin + k] + rec.shift.y;
      dst.pz[dc.begin + k] = src.pz[sc.begin + k] + rec.shift.z;
    }
  }
}

// Routes forces accumulated on ghost copies back to their unique owners and
// zeroes the ghost slots. Grouped by source subnode: each invocation writes
// only subnode src_sub's interior forces and the ghost slots sourced from
// it, which no other source subnode touches.
inline void collect_ghost_forces(const GhostCommPlan& plan,
                                 std::vector<Subnode>& subs, int src_sub) {
  for (std::int32_t ri : plan.by_src[src_sub]) {
    const GhostRecord& rec = plan.records[ri];
    SoaStore& src = subs[rec.src_sub].store;
    SoaStore& dst = subs[rec.dst_sub].store;
    const CellSpan& sc = src.cells[rec.src_cell];
    const CellSpan& dc = dst.cells[rec.dst_cell];
    if (sc.real != dc.real) {
      throw StateError("stale ghost plan: source cell holds " +
                       std::to_string(sc.real) + " particles, ghost copy " +
                       std::to_string(dc.real));
    }
    for (std::size_t k = 0; k < sc.real; ++k) {
      src.fx[sc.begin + k] += dst.fx[dc.begin + k];
      src.fy[sc.begin + k] += dst.fy[dc.begin + k];
      src.fz[sc.begin + k] += dst.fz[dc.begin + k];
      dst.fx[dc.begin + k] = 0.0;
      dst.fy[dc.begin + k] = 0.0;
      dst.fz[dc.begin + k] = 0.0;
    }
  }
}

}  // namespace taskmd
