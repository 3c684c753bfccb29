#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "taskmd/errors.hpp"
#include "taskmd/vec3.hpp"

namespace taskmd {

// Pairwise term evaluated from a squared distance. The force on particle i
// of a pair (i, j) with displacement d = r_i - r_j is force_factor * d.
struct PairTerm {
  double energy = 0.0;
  double force_factor = 0.0;
};

// Truncated Lennard-Jones interaction, optionally shifted so the energy is
// continuous (zero) at the cutoff. Forces are truncated either way.
struct LjParams {
  double epsilon = 1.0;
  double sigma = 1.0;
  double r_cut = 2.5;
  bool energy_shifted = true;
};

inline void validate_lj(const LjParams& p) {
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) {
    throw ConfigError("lj epsilon must be finite and positive");
  }
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
    throw ConfigError("lj sigma must be finite and positive");
  }
  if (!(p.r_cut > 0.0) || !std::isfinite(p.r_cut)) {
    throw ConfigError("lj r_cut must be finite and positive");
  }
}

// Constants hoisted out of the inner loop.
struct LjPrepared {
  double sigma2 = 1.0;
  double rc2 = 6.25;
  double eps4 = 4.0;
  double eps24 = 24.0;
  double shift = 0.0;
};

inline LjPrepared lj_prepare(const LjParams& p) {
  LjPrepared q;
  q.sigma2 = p.sigma * p.sigma;
  q.rc2 = p.r_cut * p.r_cut;
  q.eps4 = 4.0 * p.epsilon;
  q.eps24 = 24.0 * p.epsilon;
  if (p.energy_shifted) {
    const double s2 = q.sigma2 / q.rc2;
    const double s6 = s2 * s2 * s2;
    q.shift = q.eps4 * (s6 * s6 - s6);
  }
  return q;
}

// Both energy and force are identically zero at and beyond the cutoff.
// Precondition: r2 > 0 (coincident particles are the caller's error case).
inline PairTerm lj_eval(double r2, const LjPrepared& p) {
  if (r2 >= p.rc2) return {0.0, 0.0};
  const double inv = p.sigma2 / r2;
  const double i6 = inv * inv * inv;
  return {p.eps4 * (i6 * i6 - i6) - p.shift,
          p.eps24 * (2.0 * i6 * i6 - i6) / r2};
}

inline PairTerm lj_eval(double r2, const LjParams& p) {
  return lj_eval(r2, lj_prepare(p));
}

// Finitely extensible nonlinear elastic bond.
struct FeneParams {
  double k = 30.0;
  double r_max = 1.5;
};

inline void validate_fene(const FeneParams& p) {
  if (!(p.k > 0.0) || !std::isfinite(p.k)) {
    throw ConfigError("fene k must be finite and positive");
  }
  if (!(p.r_max > 0.0) || !std::isfinite(p.r_max)) {
    throw ConfigError("fene r_max must be finite and positive");
  }
}

// Throws once the bond reaches its maximum extension; callers that know the
// particle ids and step should test r2 < r_max^2 first and raise a richer
// message themselves.
inline PairTerm fene_eval(double r2, const FeneParams& p) {
  const double rmax2 = p.r_max * p.r_max;
  if (r2 >= rmax2) {
    throw PhysicsError("fene bond overstretched: r = " +
                       std::to_string(std::sqrt(r2)) +
                       " >= r_max = " + std::to_string(p.r_max));
  }
  const double g = 1.0 - r2 / rmax2;
  return {-0.5 * p.k * rmax2 * std::log(g), -p.k / g};
}

// Cosine bending term E = k (1 - cos(theta - theta0)) over the angle theta
// at the middle particle j of a triple (i, j, k).
struct AngleParams {
  double k = 1.0;
  double theta0 = 0.0;
};

inline void validate_angle(const AngleParams& p) {
  if (!(p.k >= 0.0) || !std::isfinite(p.k)) {
    throw ConfigError("angle k must be finite and >= 0");
  }
  constexpr double pi = 3.14159265358979323846;
  if (!(p.theta0 >= 0.0 && p.theta0 <= pi)) {
    throw ConfigError("angle theta0 must lie in [0, pi]");
  }
}

struct AngleEval {
  double energy = 0.0;
  Vec3 f_i, f_j, f_k;
};

// Takes the two bond vectors r_ij = r_i - r_j and r_kj = r_k - r_j. Forces
// are the exact negative gradient of the energy, so they sum to zero and
// carry no net torque about j. With sin(theta0) == 0 the energy reduces to
// k (1 - cos(theta0) cos(theta)), whose gradient stays finite for collinear
// triples; otherwise a collinear triple has no defined bending plane and is
// reported as a physics error, as is a zero-length bond vector.
inline AngleEval angle_eval(const Vec3& r_ij, const Vec3& r_kj,
                            const AngleParams& p) {
  const double a = norm(r_ij);
  const double b = norm(r_kj);
  if (a == 0.0 || b == 0.0) {
    throw PhysicsError("degenerate angle: zero-length bond vector");
  }
  double cos_th = dot(r_ij, r_kj) / (a * b);
  if (cos_th > 1.0) cos_th = 1.0;
  if (cos_th < -1.0) cos_th = -1.0;
  const double sin_th = std::sqrt(1.0 - cos_th * cos_th);

  const double cos0 = std::cos(p.theta0);
  const double sin0 = std::sin(p.theta0);

  // g = dE/d(cos theta). theta0 of exactly 0 or pi makes the sin(theta0)
  // term vanish analytically; the threshold absorbs sin(pi) rounding to
  // ~1e-16 instead of 0.
  double g;
  if (std::abs(sin0) < 1e-12) {
    g = -p.k * cos0;
  } else {
    if (sin_th == 0.0) {
      throw PhysicsError(
          "degenerate angle: collinear triple with theta0 off the axis");
    }
    g = -p.k * (cos0 - sin0 * cos_th / sin_th);
  }

  const Vec3 uhat = r_ij * (1.0 / a);
  const Vec3 vhat = r_kj * (1.0 / b);
  AngleEval out;
  out.energy = p.k * (1.0 - cos_th * cos0 - sin_th * sin0);
  out.f_i = (-g / a) * (vhat - cos_th * uhat);
  out.f_k = (-g / b) * (uhat - cos_th * vhat);
  out.f_j = -out.f_i - out.f_k;
  return out;
}

// Langevin thermostat contribution for one particle and one step: friction
// against the pre-kick velocity plus Gaussian noise scaled for the time
// step. The noise vector is keyed by (seed, step, id) upstream so the kernel
// stays a pure function.
struct LangevinParams {
  double gamma = 1.0;
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

inline void validate_langevin(const LangevinParams& p) {
  if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma)) {
    throw ConfigError("langevin gamma must be finite and >= 0");
  }
  if (!(p.temperature >= 0.0) || !std::isfinite(p.temperature)) {
    throw ConfigError("langevin temperature must be finite and >= 0");
  }
}

inline Vec3 langevin_force(const Vec3& velocity, double mass,
                           const LangevinParams& p, double dt,
                           const Vec3& noise) {
  const double amp = std::sqrt(2.0 * mass * p.gamma * p.temperature / dt);
  return -p.gamma * mass * velocity + amp * noise;
}

}  // namespace taskmd
