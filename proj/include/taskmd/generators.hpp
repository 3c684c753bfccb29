#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "taskmd/flat_config.hpp"
#include "taskmd/random.hpp"

namespace taskmd {

namespace gen_detail {

inline constexpr double kPi = 3.14159265358979323846;

// Maxwell-Boltzmann velocities at temperature T, keyed by particle id so
// the draw is independent of placement order.
inline void thermal_velocities(FlatConfig& f, double temperature,
                               std::uint64_t seed) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double scale = std::sqrt(temperature / f.mass[k]);
    f.vel[k] = scale * counter_normal3(seed, RngContext::kVelocityInit, 0,
                                       static_cast<std::uint64_t>(f.id[k]));
  }
}

// Removes the net momentum so the system has no center-of-mass drift.
inline void zero_net_momentum(FlatConfig& f) {
  Vec3 p{0.0, 0.0, 0.0};
  double total_mass = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    p += f.mass[k] * f.vel[k];
    total_mass += f.mass[k];
  }
  if (total_mass == 0.0) return;
  const Vec3 drift = (1.0 / total_mass) * p;
  for (std::size_t k = 0; k < f.size(); ++k) f.vel[k] -= drift;
}

inline double cube_edge(std::size_t n, double rho) {
  return std::cbrt(static_cast<double>(n) / rho);
}

}  // namespace gen_detail

// Simple cubic lattice at density rho: the smallest cube of lattice sites
// holding N particles, excess sites left empty from the end of the
// x-fastest site order. Velocities are thermal at T with zero net momentum.
inline FlatConfig gen_lattice(std::size_t n, double rho, double temperature,
                              std::uint64_t seed) {
  if (n < 1) throw ConfigError("lattice generator needs at least 1 particle");
  if (!(rho > 0.0)) throw ConfigError("density must be positive");
  if (temperature < 0.0) throw ConfigError("temperature must be non-negative");

  FlatConfig f;
  const double edge = gen_detail::cube_edge(n, rho);
  f.box = BoxSpec::cubic(edge);

  std::size_t side = 1;
  while (side * side * side < n) side += 1;
  const double spacing = edge / static_cast<double>(side);

  std::int64_t next_id = 0;
  for (std::size_t z = 0; z < side && f.size() < n; ++z) {
    for (std::size_t y = 0; y < side && f.size() < n; ++y) {
      for (std::size_t x = 0; x < side && f.size() < n; ++x) {
        ParticleRec rec;
        rec.id = next_id++;
        rec.pos = {(static_cast<double>(x) + 0.5) * spacing,
                   (static_cast<double>(y) + 0.5) * spacing,
                   (static_cast<double>(z) + 0.5) * spacing};
        f.push(rec);
      }
    }
  }

  gen_detail::thermal_velocities(f, temperature, seed);
  gen_detail::zero_net_momentum(f);
  return f;
}

// A sphere of dense material in a dilute background: lattice sites at
// density rho_in are kept unconditionally inside the central sphere of
// diameter diameter_fraction * L and with probability alpha outside it, so
// the outside density is alpha * rho_in in expectation.
inline FlatConfig gen_spherical(double box_length, double diameter_fraction,
                                double rho_in, double alpha,
                                double temperature, std::uint64_t seed) {
  if (!(box_length > 0.0)) throw ConfigError("box length must be positive");
  if (!(diameter_fraction > 0.0) || diameter_fraction > 1.0) {
    throw ConfigError("sphere diameter fraction must be in (0, 1]");
  }
  if (!(rho_in > 0.0)) throw ConfigError("density must be positive");
  if (alpha < 0.0 || alpha > 1.0) {
    throw ConfigError("density factor alpha must be in [0, 1]");
  }
  if (temperature < 0.0) throw ConfigError("temperature must be non-negative");

  FlatConfig f;
  f.box = BoxSpec::cubic(box_length);

  const double target_spacing = std::cbrt(1.0 / rho_in);
  const std::size_t side = static_cast<std::size_t>(
      std::max(1.0, std::round(box_length / target_spacing)));
  const double spacing = box_length / static_cast<double>(side);
  const double radius = 0.5 * diameter_fraction * box_length;
  const Vec3 center{0.5 * box_length, 0.5 * box_length, 0.5 * box_length};

  std::int64_t next_id = 0;
  std::uint64_t site = 0;
  for (std::size_t z = 0; z < side; ++z) {
    for (std::size_t y = 0; y < side; ++y) {
      for (std::size_t x = 0; x < side; ++x, ++site) {
        const Vec3 pos{(static_cast<double>(x) + 0.5) * spacing,
                       (static_cast<double>(y) + 0.5) * spacing,
                       (static_cast<double>(z) + 0.5) * spacing};
        const bool inside = norm2(pos - center) <= radius * radius;
        if (!inside &&
            counter_uniform(seed, RngContext::kPlacement, 0, site, 0) >=
                alpha) {
          continue;
        }
        ParticleRec rec;
        rec.id = next_id++;
        rec.pos = pos;
        f.push(rec);
      }
    }
  }

  gen_detail::thermal_velocities(f, temperature, seed);
  gen_detail::zero_net_momentum(f);
  return f;
}

// Ring polymer melt: each chain is a regular polygon with the given edge
// length, randomly oriented and randomly placed, wrapped into the box.
// Bonds close each ring; angles cover every consecutive triple. Velocities
// start at zero (a thermostat brings the melt to temperature).
inline FlatConfig gen_polymer_melt(std::size_t chains,
                                   std::size_t chain_length, double rho,
                                   std::uint64_t seed,
                                   double bond_length = 0.97) {
  if (chains < 1) throw ConfigError("melt generator needs at least 1 chain");
  if (chain_length < 3) {
    throw ConfigError("ring chains need at least 3 beads");
  }
  if (!(rho > 0.0)) throw ConfigError("density must be positive");
  if (!(bond_length > 0.0)) throw ConfigError("bond length must be positive");

  FlatConfig f;
  const std::size_t n = chains * chain_length;
  f.box = BoxSpec::cubic(gen_detail::cube_edge(n, rho));

  const double m = static_cast<double>(chain_length);
  const double ring_radius =
      bond_length / (2.0 * std::sin(gen_detail::kPi / m));

  for (std::size_t c = 0; c < chains; ++c) {
    // Uniform random rotation from a normalized 4-component Gaussian.
    const Vec3 q1 = counter_normal3(seed, RngContext::kPlacement, c, 0);
    const Vec3 q2 = counter_normal3(seed, RngContext::kPlacement, c, 1);
    double qw = q1.x, qx = q1.y, qy = q1.z, qz = q2.x;
    const double qn = std::sqrt(qw * qw + qx * qx + qy * qy + qz * qz);
    if (qn < 1e-12) {
      qw = 1.0;
      qx = qy = qz = 0.0;
    } else {
      qw /= qn;
      qx /= qn;
      qy /= qn;
      qz /= qn;
    }
    const double r00 = 1.0 - 2.0 * (qy * qy + qz * qz);
    const double r01 = 2.0 * (qx * qy - qw * qz);
    const double r10 = 2.0 * (qx * qy + qw * qz);
    const double r11 = 1.0 - 2.0 * (qx * qx + qz * qz);
    const double r20 = 2.0 * (qx * qz - qw * qy);
    const double r21 = 2.0 * (qy * qz + qw * qx);

    const Vec3 u = counter_uniform3(seed, RngContext::kPlacement, c, 2);
    const Vec3 center{u.x * f.box.length.x, u.y * f.box.length.y,
                      u.z * f.box.length.z};

    const std::int64_t base = static_cast<std::int64_t>(c * chain_length);
    for (std::size_t k = 0; k < chain_length; ++k) {
      const double phi =
          2.0 * gen_detail::kPi * static_cast<double>(k) / m;
      const double lx = ring_radius * std::cos(phi);
      const double ly = ring_radius * std::sin(phi);
      ParticleRec rec;
      rec.id = base + static_cast<std::int64_t>(k);
      rec.pos = wrap_position({center.x + r00 * lx + r01 * ly,
                               center.y + r10 * lx + r11 * ly,
                               center.z + r20 * lx + r21 * ly},
                              f.box);
      f.push(rec);

      const std::int64_t next =
          base + static_cast<std::int64_t>((k + 1) % chain_length);
      const std::int64_t prev =
          base + static_cast<std::int64_t>((k + chain_length - 1) %
                                           chain_length);
      f.topo.bonds.push_back({rec.id, next});
      f.topo.angles.push_back({prev, rec.id, next});
    }
  }
  return f;
}

// Uniformly random positions with a minimum pair separation, by rejection
// sampling. The separation keeps worst-case pair forces moderate so that
// force comparisons against the reference path are meaningful at tight
// absolute tolerances.
inline FlatConfig gen_random(std::size_t n, double rho, double min_distance,
                             double temperature, std::uint64_t seed) {
  if (n < 1) throw ConfigError("random generator needs at least 1 particle");
  if (!(rho > 0.0)) throw ConfigError("density must be positive");
  if (min_distance < 0.0) {
    throw ConfigError("minimum distance must be non-negative");
  }
  if (temperature < 0.0) throw ConfigError("temperature must be non-negative");

  FlatConfig f;
  f.box = BoxSpec::cubic(gen_detail::cube_edge(n, rho));
  const double d2 = min_distance * min_distance;
  constexpr std::uint64_t kMaxAttempts = 100000;

  std::uint64_t attempt = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (;;) {
      if (attempt >= kMaxAttempts * n) {
        throw ConfigError(
            "random placement failed: density too high for the requested "
            "minimum distance");
      }
      const Vec3 u =
          counter_uniform3(seed, RngContext::kPlacement, attempt++, k);
      const Vec3 pos{u.x * f.box.length.x, u.y * f.box.length.y,
                     u.z * f.box.length.z};
      bool ok = true;
      for (std::size_t j = 0; j < f.size(); ++j) {
        if (norm2(minimum_image(pos - f.pos[j], f.box)) < d2) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      ParticleRec rec;
      rec.id = static_cast<std::int64_t>(k);
      rec.pos = pos;
      f.push(rec);
      break;
    }
  }

  gen_detail::thermal_velocities(f, temperature, seed);
  gen_detail::zero_net_momentum(f);
  return f;
}

}  // namespace taskmd
