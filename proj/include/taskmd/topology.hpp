#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "taskmd/errors.hpp"

namespace taskmd {

// Fixed bonded structure, by particle id. A bond acts between a and b; an
// angle bends at the middle particle j of the triple (i, j, k).
struct Bond {
  std::int64_t a = 0;
  std::int64_t b = 0;
};

struct Angle {
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t k = 0;
};

struct Topology {
  std::vector<Bond> bonds;
  std::vector<Angle> angles;

  bool empty() const { return bonds.empty() && angles.empty(); }
};

inline void validate_topology(const Topology& topo,
                              const std::unordered_set<std::int64_t>& ids) {
  for (const Bond& b : topo.bonds) {
    if (!ids.count(b.a) || !ids.count(b.b)) {
      throw ConfigError("bond references unknown particle id " +
                        std::to_string(ids.count(b.a) ? b.b : b.a));
    }
    if (b.a == b.b) {
      throw ConfigError("bond connects particle id " + std::to_string(b.a) +
                        " to itself");
    }
  }
  for (const Angle& a : topo.angles) {
    if (!ids.count(a.i) || !ids.count(a.j) || !ids.count(a.k)) {
      throw ConfigError("angle references an unknown particle id");
    }
    if (a.i == a.j || a.j == a.k || a.i == a.k) {
      throw ConfigError("angle repeats a particle id");
    }
  }
}

}  // namespace taskmd
