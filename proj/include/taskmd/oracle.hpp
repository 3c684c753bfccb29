#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "taskmd/domain.hpp"

namespace taskmd {

// Brute-force reference implementations used to check the decomposed
// engine. Everything here is written from the definitions (O(N^2) loops,
// minimum-image convention, textbook formulas via std::pow, finite
// differences for bonded forces) and deliberately shares no code with the
// production kernels, so a mistake on either side shows up as disagreement.
// Valid whenever every box edge exceeds twice the interaction range, which
// makes the nearest periodic image the only reachable one.

struct OracleResult {
  std::vector<Vec3> force;  // indexed like the input arrays
  double pair_energy = 0.0;
  double bond_energy = 0.0;
  double angle_energy = 0.0;

  double potential() const { return pair_energy + bond_energy + angle_energy; }
};

// All unordered id pairs within r_verlet (inclusive) under minimum image,
// sorted, each with ids in ascending order. Reference for neighbor list
// contents.
inline std::vector<std::pair<std::int64_t, std::int64_t>> oracle_pair_set(
    const FlatConfig& cfg, double r_verlet) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  const std::size_t n = cfg.size();
  const double rv2 = r_verlet * r_verlet;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const Vec3 d = minimum_image(cfg.pos[a] - cfg.pos[b], cfg.box);
      if (norm2(d) <= rv2) {
        pairs.emplace_back(std::min(cfg.id[a], cfg.id[b]),
                           std::max(cfg.id[a], cfg.id[b]));
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

namespace oracle_detail {

// Pair energy as a plain function of distance, for the finite-difference
// force check and the cutoff shift.
inline double lj_energy_of_r(double r, const LjParams& p) {
  const double sr6 = std::pow(p.sigma / r, 6.0);
  return 4.0 * p.epsilon * (std::pow(sr6, 2.0) - sr6);
}

// Total bonded energy of a configuration with particle n displaced by h
// along axis. Used to differentiate numerically.
inline double bonded_energy_displaced(const FlatConfig& cfg,
                                      const Interactions& inter,
                                      std::size_t moved, int axis, double h) {
  std::vector<std::size_t> index_of;
  {
    std::int64_t max_id = 0;
    for (std::int64_t id : cfg.id) max_id = std::max(max_id, id);
    index_of.assign(static_cast<std::size_t>(max_id) + 1, 0);
    for (std::size_t k = 0; k < cfg.size(); ++k) {
      index_of[static_cast<std::size_t>(cfg.id[k])] = k;
    }
  }
  auto pos_of = [&](std::int64_t id) {
    Vec3 p = cfg.pos[index_of[static_cast<std::size_t>(id)]];
    if (index_of[static_cast<std::size_t>(id)] == moved) {
      if (axis == 0) p.x += h;
      if (axis == 1) p.y += h;
      if (axis == 2) p.z += h;
    }
    return p;
  };

  double e = 0.0;
  if (inter.fene) {
    const double big_r = inter.fene->r_max;
    for (const Bond& b : cfg.topo.bonds) {
      const Vec3 d = minimum_image(pos_of(b.a) - pos_of(b.b), cfg.box);
      const double x = norm2(d) / (big_r * big_r);
      e += -0.5 * inter.fene->k * big_r * big_r * std::log(1.0 - x);
    }
  }
  if (inter.angle) {
    for (const Angle& a : cfg.topo.angles) {
      const Vec3 u = minimum_image(pos_of(a.i) - pos_of(a.j), cfg.box);
      const Vec3 v = minimum_image(pos_of(a.k) - pos_of(a.j), cfg.box);
      const double c = dot(u, v) / (norm(u) * norm(v));
      const double theta = std::acos(std::clamp(c, -1.0, 1.0));
      e += inter.angle->k * (1.0 - std::cos(theta - inter.angle->theta0));
    }
  }
  return e;
}

}  // namespace oracle_detail

// Forces and potential energy by direct summation: analytic pair forces
// from the textbook derivative, bonded forces by central finite differences
// of the bonded energy (accurate to about 1e-9 relative; use tolerances
// accordingly).
inline OracleResult oracle_forces_energy(const FlatConfig& cfg,
                                         const Interactions& inter) {
  OracleResult out;
  const std::size_t n = cfg.size();
  out.force.assign(n, Vec3{0.0, 0.0, 0.0});

  const LjParams& lj = inter.lj;
  const double rc = lj.r_cut;
  const double shift =
      lj.energy_shifted ? oracle_detail::lj_energy_of_r(rc, lj) : 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const Vec3 d = minimum_image(cfg.pos[a] - cfg.pos[b], cfg.box);
      const double r = norm(d);
      if (r >= rc) continue;
      if (r == 0.0) {
        throw PhysicsError("oracle: overlapping particles " +
                           std::to_string(cfg.id[a]) + " and " +
                           std::to_string(cfg.id[b]));
      }
      out.pair_energy += oracle_detail::lj_energy_of_r(r, lj) - shift;
      const double sr6 = std::pow(lj.sigma / r, 6.0);
      const double fmag =
          24.0 * lj.epsilon * (2.0 * std::pow(sr6, 2.0) - sr6) / r;
      const Vec3 f = (fmag / r) * d;
      out.force[a] += f;
      out.force[b] -= f;
    }
  }

  if (!cfg.topo.bonds.empty() || !cfg.topo.angles.empty()) {
    const double h = 1e-6;
    for (std::size_t k = 0; k < n; ++k) {
      for (int axis = 0; axis < 3; ++axis) {
        const double ep =
            oracle_detail::bonded_energy_displaced(cfg, inter, k, axis, h);
        const double em =
            oracle_detail::bonded_energy_displaced(cfg, inter, k, axis, -h);
        const double g = (ep - em) / (2.0 * h);
        if (axis == 0) out.force[k].x -= g;
        if (axis == 1) out.force[k].y -= g;
        if (axis == 2) out.force[k].z -= g;
      }
    }
    out.bond_energy = 0.0;
    out.angle_energy = 0.0;
    if (inter.fene) {
      const double big_r = inter.fene->r_max;
      for (const Bond& b : cfg.topo.bonds) {
        std::size_t ia = 0, ib = 0;
        for (std::size_t k = 0; k < n; ++k) {
          if (cfg.id[k] == b.a) ia = k;
          if (cfg.id[k] == b.b) ib = k;
        }
        const Vec3 d = minimum_image(cfg.pos[ia] - cfg.pos[ib], cfg.box);
        const double x = norm2(d) / (big_r * big_r);
        out.bond_energy +=
            -0.5 * inter.fene->k * big_r * big_r * std::log(1.0 - x);
      }
    }
    if (inter.angle) {
      for (const Angle& a : cfg.topo.angles) {
        std::size_t ii = 0, ij = 0, ik = 0;
        for (std::size_t k = 0; k < n; ++k) {
          if (cfg.id[k] == a.i) ii = k;
          if (cfg.id[k] == a.j) ij = k;
          if (cfg.id[k] == a.k) ik = k;
        }
        const Vec3 u = minimum_image(cfg.pos[ii] - cfg.pos[ij], cfg.box);
        const Vec3 v = minimum_image(cfg.pos[ik] - cfg.pos[ij], cfg.box);
        const double c =
            std::clamp(dot(u, v) / (norm(u) * norm(v)), -1.0, 1.0);
        const double theta = std::acos(c);
        out.angle_energy +=
            inter.angle->k * (1.0 - std::cos(theta - inter.angle->theta0));
      }
    }
  }
  return out;
}

// Per-particle mean half-list neighbor count implied by a pair set.
inline double mean_half_neighbors(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
    std::size_t n) {
  return n == 0 ? 0.0 : static_cast<double>(pairs.size()) /
                            static_cast<double>(n);
}

}  // namespace taskmd
