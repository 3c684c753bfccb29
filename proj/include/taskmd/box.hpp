#pragma once

#include <cmath>
#include <string>

#include "taskmd/errors.hpp"
#include "taskmd/vec3.hpp"

namespace taskmd {

// Orthorhombic periodic box. Positions live in [0, length_k) per axis once
// wrapped; displacements are reduced to [-length_k/2, length_k/2].
struct BoxSpec {
  Vec3 length{0.0, 0.0, 0.0};

  double volume() const { return length.x * length.y * length.z; }

  static BoxSpec cubic(double edge) { return BoxSpec{{edge, edge, edge}}; }
};

inline void validate_box(const BoxSpec& box) {
  const double ls[3] = {box.length.x, box.length.y, box.length.z};
  for (double l : ls) {
    if (!std::isfinite(l) || l <= 0.0) {
      throw ConfigError("box lengths must be finite and positive, got " +
                        std::to_string(l));
    }
  }
}

// Nearest periodic image of a displacement vector, in [-length/2, length/2).
// std::remainder reduces into the closed interval; the half-open convention
// folds the upper endpoint to the lower one, which keeps the map idempotent.
inline double minimum_image1(double d, double length) {
  double r = std::remainder(d, length);
  if (r == 0.5 * length) r = -0.5 * length;
  return r;
}

inline Vec3 minimum_image(const Vec3& d, const BoxSpec& box) {
  return {minimum_image1(d.x, box.length.x), minimum_image1(d.y, box.length.y),
          minimum_image1(d.z, box.length.z)};
}

// Wraps a coordinate into [0, length). The floor form can land exactly on
// length when p is a tiny negative value; that case folds back to 0.
inline double wrap1(double p, double length) {
  double r = p - length * std::floor(p / length);
  if (r >= length) r -= length;
  return r;
}

inline Vec3 wrap_position(const Vec3& p, const BoxSpec& box) {
  return {wrap1(p.x, box.length.x), wrap1(p.y, box.length.y),
          wrap1(p.z, box.length.z)};
}

}  // namespace taskmd
