#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "taskmd/cell_grid.hpp"
#include "taskmd/soa_store.hpp"

namespace taskmd {

// One unit of task granularity: a rectangular range of the domain's cell
// grid plus a one-cell ghost shell around it. The subnode's store has one
// cell per LOCAL cell; local coordinates run over [0, ldims) with index 0
// and ldims-1 being the ghost layers, so owned global cell g maps to local
// g - lo + 1.
//
// Each local cell knows the global cell it mirrors and, for ghost cells,
// the periodic shift to apply to copied positions. The shift is nonzero
// only when the ghost layer wraps around a periodic boundary, so a ghost
// copy's position is its source position plus the shift, and force kernels
// can use plain (unreduced) displacements.
struct Subnode {
  int index = 0;
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};  // exclusive
  std::array<int, 3> ldims{0, 0, 0};

  SoaStore store;

  std::vector<std::int32_t> local_to_global;  // local cell -> global cell
  std::vector<std::uint8_t> ghost;            // local cell -> is ghost layer
  std::vector<Vec3> shift;                    // local cell -> periodic shift
  std::vector<std::int32_t> interior;         // local indices of owned cells

  int lcells() const { return ldims[0] * ldims[1] * ldims[2]; }

  int llinear(int lx, int ly, int lz) const {
    return lx + ldims[0] * (ly + ldims[1] * lz);
  }

  int local_of_owned(int gx, int gy, int gz) const {
    return llinear(gx - lo[0] + 1, gy - lo[1] + 1, gz - lo[2] + 1);
  }

  std::size_t real_count() const {
    std::size_t n = 0;
    for (std::int32_t c : interior) n += store.cells[c].real;
    return n;
  }
};

// Lays out the local grid of one subnode: ghost flags, global-cell mapping
// with periodic wrap, and the position shift for wrapped ghost layers.
// Particle data is filled in separately.
inline Subnode make_subnode_layout(const CellGrid& grid, int index,
                                   const std::array<int, 3>& lo,
                                   const std::array<int, 3>& hi) {
  Subnode sn;
  sn.index = index;
  sn.lo = lo;
  sn.hi = hi;
  for (int k = 0; k < 3; ++k) sn.ldims[k] = hi[k] - lo[k] + 2;

  const int n = sn.lcells();
  sn.local_to_global.resize(n);
  sn.ghost.resize(n);
  sn.shift.resize(n);
  sn.interior.reserve((hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]));

  const double lens[3] = {grid.box.length.x, grid.box.length.y,
                          grid.box.length.z};
  for (int lz = 0; lz < sn.ldims[2]; ++lz) {
    for (int ly = 0; ly < sn.ldims[1]; ++ly) {
      for (int lx = 0; lx < sn.ldims[0]; ++lx) {
        const int l = sn.llinear(lx, ly, lz);
        const int raw[3] = {lo[0] + lx - 1, lo[1] + ly - 1, lo[2] + lz - 1};
        int g[3];
        double sh[3];
        bool is_ghost = false;
        for (int k = 0; k < 3; ++k) {
          g[k] = raw[k];
          sh[k] = 0.0;
          if (raw[k] < 0) {
            g[k] = raw[k] + grid.dims[k];
            sh[k] = -lens[k];
          } else if (raw[k] >= grid.dims[k]) {
            g[k] = raw[k] - grid.dims[k];
            sh[k] = lens[k];
          }
          if (raw[k] < lo[k] || raw[k] >= hi[k]) is_ghost = true;
        }
        sn.local_to_global[l] = grid.linear(g[0], g[1], g[2]);
        sn.ghost[l] = is_ghost ? 1 : 0;
        sn.shift[l] = {sh[0], sh[1], sh[2]};
        if (!is_ghost) sn.interior.push_back(l);
      }
    }
  }
  return sn;
}

}  // namespace taskmd
