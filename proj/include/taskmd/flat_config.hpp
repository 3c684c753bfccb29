#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "taskmd/box.hpp"
#include "taskmd/errors.hpp"
#include "taskmd/soa_store.hpp"
#include "taskmd/topology.hpp"

namespace taskmd {

// A decomposition-free snapshot of the whole system: parallel arrays plus
// the bonded topology. This is what generators emit, what the brute-force
// reference consumes, and what domains are built from.
struct FlatConfig {
  BoxSpec box;
  std::vector<std::int64_t> id;
  std::vector<std::int32_t> type;
  std::vector<double> mass;
  std::vector<Vec3> pos;
  std::vector<Vec3> vel;
  Topology topo;

  std::size_t size() const { return id.size(); }

  void push(const ParticleRec& r) {
    id.push_back(r.id);
    type.push_back(r.type);
    mass.push_back(r.mass);
    pos.push_back(r.pos);
    vel.push_back(r.vel);
  }

  ParticleRec record(std::size_t n) const {
    return {id[n], type[n], mass[n], pos[n], vel[n]};
  }
};

inline void validate_flat(const FlatConfig& f) {
  validate_box(f.box);
  const std::size_t n = f.size();
  if (f.type.size() != n || f.mass.size() != n || f.pos.size() != n ||
      f.vel.size() != n) {
    throw ConfigError("flat config arrays have mismatched lengths");
  }
  std::unordered_set<std::int64_t> ids;
  ids.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!ids.insert(f.id[k]).second) {
      throw ConfigError("duplicate particle id " + std::to_string(f.id[k]));
    }
    if (!(f.mass[k] > 0.0)) {
      throw ConfigError("particle id " + std::to_string(f.id[k]) +
                        " has non-positive mass");
    }
  }
  validate_topology(f.topo, ids);
}

}  // namespace taskmd
