#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "taskmd/box.hpp"
#include "taskmd/errors.hpp"
#include "taskmd/soa_store.hpp"

namespace taskmd {

// Partition of the box into rectangular cells of edge >= r_cut + r_skin, so
// every pair within the Verlet radius lies in the same or an adjacent cell.
// This describes the real cells only; ghost shells are laid out per subnode
// around the region each subnode owns.
struct CellGrid {
  BoxSpec box;
  std::array<int, 3> dims{1, 1, 1};
  Vec3 cell_len;
  double r_verlet = 0.0;

  int ncells() const { return dims[0] * dims[1] * dims[2]; }

  int linear(int cx, int cy, int cz) const {
    return cx + dims[0] * (cy + dims[1] * cz);
  }

  std::array<int, 3> coords(int lin) const {
    return {lin % dims[0], (lin / dims[0]) % dims[1], lin / (dims[0] * dims[1])};
  }

  // Cell coordinates of a wrapped position; the clamp absorbs coordinates
  // that land exactly on the upper box face through rounding.
  std::array<int, 3> cell_coords(const Vec3& p) const {
    const double c[3] = {p.x / cell_len.x, p.y / cell_len.y, p.z / cell_len.z};
    std::array<int, 3> out{};
    for (int k = 0; k < 3; ++k) {
      int v = static_cast<int>(std::floor(c[k]));
      if (v < 0) v = 0;
      if (v >= dims[k]) v = dims[k] - 1;
      out[k] = v;
    }
    return out;
  }

  int cell_of(const Vec3& p) const {
    const auto c = cell_coords(p);
    return linear(c[0], c[1], c[2]);
  }
};

inline CellGrid build_cell_grid(const BoxSpec& box, double r_cut,
                                double r_skin) {
  validate_box(box);
  if (!(r_cut > 0.0) || !std::isfinite(r_cut)) {
    throw ConfigError("r_cut must be finite and positive");
  }
  if (!(r_skin >= 0.0) || !std::isfinite(r_skin)) {
    throw ConfigError("r_skin must be finite and >= 0");
  }
  const double r_verlet = r_cut + r_skin;
  const double ls[3] = {box.length.x, box.length.y, box.length.z};
  CellGrid g;
  g.box = box;
  g.r_verlet = r_verlet;
  for (int k = 0; k < 3; ++k) {
    if (ls[k] < r_verlet) {
      throw ConfigError("box length " + std::to_string(ls[k]) +
                        " is smaller than one cell (r_cut + r_skin = " +
                        std::to_string(r_verlet) + ")");
    }
    g.dims[k] = std::max(1, static_cast<int>(std::floor(ls[k] / r_verlet)));
  }
  g.cell_len = {ls[0] / g.dims[0], ls[1] / g.dims[1], ls[2] / g.dims[2]};
  return g;
}

// Regroups the live particles of a store into one cell per grid cell.
// Positions are wrapped into the box as part of binning.
inline SoaStore bin_particles(const SoaStore& store, const CellGrid& grid) {
  std::vector<std::vector<ParticleRec>> buckets(grid.ncells());
  for (std::size_t c = 0; c < store.cells.size(); ++c) {
    const CellSpan& span = store.cells[c];
    for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
      ParticleRec rec = store.record(k);
      if (!std::isfinite(rec.pos.x) || !std::isfinite(rec.pos.y) ||
          !std::isfinite(rec.pos.z)) {
        throw PhysicsError("non-finite position for particle id " +
                           std::to_string(rec.id));
      }
      rec.pos = wrap_position(rec.pos, grid.box);
      buckets[grid.cell_of(rec.pos)].push_back(rec);
    }
  }
  return SoaStore::build(buckets);
}

}  // namespace taskmd
