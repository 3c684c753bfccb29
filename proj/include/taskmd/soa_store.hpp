#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "taskmd/aligned.hpp"
#include "taskmd/errors.hpp"
#include "taskmd/vec3.hpp"

namespace taskmd {

// One particle as carried between stores (generation, redistribution).
// Forces are not part of the record: they are recomputed from scratch right
// after any redistribution, before anything reads them.
struct ParticleRec {
  std::int64_t id = -1;
  std::int32_t type = 0;
  double mass = 1.0;
  Vec3 pos;
  Vec3 vel;
};

struct CellSpan {
  std::size_t begin = 0;   // first slot of the cell
  std::size_t real = 0;    // live particles
  std::size_t padded = 0;  // live + sentinel padding, multiple of kChunk
};

// Structure-of-arrays particle storage, grouped by cell. Each cell's slots
// are contiguous and padded with sentinel entries up to a multiple of eight
// doubles (one 64-byte lane), so a vectorized loop over a cell never needs a
// scalar tail. A dedicated all-sentinel chunk sits at the end of every array
// as a safe landing target for padded index lists.
//
// Sentinel entries carry id -1 and coordinates far outside any box, so they
// fail every cutoff test and contribute nothing to forces or energies.
//
// Invariants: all arrays have equal length; cells tile [0, sentinel_begin)
// in order; real <= padded and padded % kChunk == 0 per cell. build() makes
// padded minimal; remove() keeps padded unchanged (O(1) swap-with-last, the
// vacated slot re-sentineled), so padded can exceed the minimal multiple
// until the next rebuild.
class SoaStore {
 public:
  static constexpr std::size_t kChunk = 8;
  static constexpr double kSentinelCoord = 1.0e9;
  static constexpr std::int64_t kSentinelId = -1;

  std::vector<CellSpan> cells;
  std::size_t sentinel_begin = 0;

  aligned_vector<std::int64_t> id;
  aligned_vector<std::int32_t> type;
  aligned_vector<double> mass;
  aligned_vector<double> px, py, pz;
  aligned_vector<double> vx, vy, vz;
  aligned_vector<double> fx, fy, fz;

  static SoaStore build(const std::vector<std::vector<ParticleRec>>& by_cell) {
    SoaStore s;
    s.cells.resize(by_cell.size());
    std::size_t offset = 0;
    for (std::size_t c = 0; c < by_cell.size(); ++c) {
      const std::size_t n = by_cell[c].size();
      s.cells[c] = {offset, n, round_up(n)};
      offset += s.cells[c].padded;
    }
    s.sentinel_begin = offset;
    s.resize_all(offset + kChunk);
    for (std::size_t slot = 0; slot < s.size(); ++slot) s.write_sentinel(slot);
    for (std::size_t c = 0; c < by_cell.size(); ++c) {
      for (std::size_t k = 0; k < by_cell[c].size(); ++k) {
        s.write(s.cells[c].begin + k, by_cell[c][k]);
      }
    }
    return s;
  }

  std::size_t size() const { return id.size(); }

  std::size_t real_total() const {
    std::size_t n = 0;
    for (const auto& c : cells) n += c.real;
    return n;
  }

  Vec3 position(std::size_t slot) const {
    return {px[slot], py[slot], pz[slot]};
  }
  Vec3 velocity(std::size_t slot) const {
    return {vx[slot], vy[slot], vz[slot]};
  }
  Vec3 force(std::size_t slot) const { return {fx[slot], fy[slot], fz[slot]}; }

  ParticleRec record(std::size_t slot) const {
    return {id[slot], type[slot], mass[slot], position(slot), velocity(slot)};
  }

  // Adds a particle to a cell, growing the cell by one chunk when its
  // padding is exhausted. Growth shifts every later cell and the trailing
  // sentinel block, so slot indices held elsewhere become stale.
  void append(std::size_t cell, const ParticleRec& rec) {
    CellSpan& c = cells[cell];
    if (c.real == c.padded) {
      insert_chunk(c.begin + c.padded);
      c.padded += kChunk;
      for (std::size_t d = cell + 1; d < cells.size(); ++d) {
        cells[d].begin += kChunk;
      }
      sentinel_begin += kChunk;
    }
    write(c.begin + c.real, rec);
    c.real += 1;
  }

  // Removes the k-th live particle of a cell by swapping the last live slot
  // into its place and re-sentineling the vacated slot. O(1); padding stays.
  void remove(std::size_t cell, std::size_t k) {
    CellSpan& c = cells[cell];
    if (k >= c.real) {
      throw StateError("remove: slot " + std::to_string(k) +
                       " out of range for cell with " + std::to_string(c.real) +
                       " live entries");
    }
    const std::size_t slot = c.begin + k;
    const std::size_t last = c.begin + c.real - 1;
    if (slot != last) copy_slot(last, slot);
    write_sentinel(last);
    c.real -= 1;
  }

  void write(std::size_t slot, const ParticleRec& rec) {
    id[slot] = rec.id;
    type[slot] = rec.type;
    mass[slot] = rec.mass;
    px[slot] = rec.pos.x;
    py[slot] = rec.pos.y;
    pz[slot] = rec.pos.z;
    vx[slot] = rec.vel.x;
    vy[slot] = rec.vel.y;
    vz[slot] = rec.vel.z;
    fx[slot] = 0.0;
    fy[slot] = 0.0;
    fz[slot] = 0.0;
  }

 private:
  static std::size_t round_up(std::size_t n) {
    return (n + kChunk - 1) / kChunk * kChunk;
  }

  void resize_all(std::size_t n) {
    id.resize(n);
    type.resize(n);
    mass.resize(n);
    px.resize(n);
    py.resize(n);
    pz.resize(n);
    vx.resize(n);
    vy.resize(n);
    vz.resize(n);
    fx.resize(n);
    fy.resize(n);
    fz.resize(n);
  }

  void write_sentinel(std::size_t slot) {
    id[slot] = kSentinelId;
    type[slot] = -1;
    mass[slot] = 1.0;
    px[slot] = kSentinelCoord;
    py[slot] = kSentinelCoord;
    pz[slot] = kSentinelCoord;
    vx[slot] = 0.0;
    vy[slot] = 0.0;
    vz[slot] = 0.0;
    fx[slot] = 0.0;
    fy[slot] = 0.0;
    fz[slot] = 0.0;
  }

  void copy_slot(std::size_t from, std::size_t to) {
    id[to] = id[from];
    type[to] = type[from];
    mass[to] = mass[from];
    px[to] = px[from];
    py[to] = py[from];
    pz[to] = pz[from];
    vx[to] = vx[from];
    vy[to] = vy[from];
    vz[to] = vz[from];
    fx[to] = fx[from];
    fy[to] = fy[from];
    fz[to] = fz[from];
  }

  void insert_chunk(std::size_t at) {
    id.insert(id.begin() + at, kChunk, kSentinelId);
    type.insert(type.begin() + at, kChunk, -1);
    mass.insert(mass.begin() + at, kChunk, 1.0);
    px.insert(px.begin() + at, kChunk, kSentinelCoord);
    py.insert(py.begin() + at, kChunk, kSentinelCoord);
    pz.insert(pz.begin() + at, kChunk, kSentinelCoord);
    vx.insert(vx.begin() + at, kChunk, 0.0);
    vy.insert(vy.begin() + at, kChunk, 0.0);
    vz.insert(vz.begin() + at, kChunk, 0.0);
    fx.insert(fx.begin() + at, kChunk, 0.0);
    fy.insert(fy.begin() + at, kChunk, 0.0);
    fz.insert(fz.begin() + at, kChunk, 0.0);
  }
};

struct KineticResult {
  double kinetic = 0.0;
  std::size_t count = 0;

  // T = 2 KE / (3 N), three translational degrees of freedom per particle.
  double temperature() const {
    return count == 0 ? 0.0
                      : 2.0 * kinetic / (3.0 * static_cast<double>(count));
  }
};

// Kinetic energy over the live entries of the given cells.
inline KineticResult kinetic_energy(const SoaStore& s,
                                    const std::vector<std::size_t>& cell_ids) {
  KineticResult r;
  for (std::size_t c : cell_ids) {
    const CellSpan& span = s.cells[c];
    for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
      r.kinetic += 0.5 * s.mass[k] *
                   (s.vx[k] * s.vx[k] + s.vy[k] * s.vy[k] + s.vz[k] * s.vz[k]);
    }
    r.count += span.real;
  }
  return r;
}

inline KineticResult kinetic_energy(const SoaStore& s) {
  std::vector<std::size_t> all(s.cells.size());
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
  return kinetic_energy(s, all);
}

inline KineticResult kinetic_energy_and_temperature(const SoaStore& s) {
  KineticResult r = kinetic_energy(s);
  if (r.count == 0) {
    throw ConfigError("empty system: temperature undefined for N = 0");
  }
  return r;
}

}  // namespace taskmd
