#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "taskmd/potentials.hpp"

using namespace taskmd;

namespace {

// Central finite difference of a scalar function of r. The step is scaled
// to r; the comparison tolerance below leaves room for the ~1e-9 noise
// floor this stencil carries on steep potentials.
template <class F>
double fd_derivative(F f, double r, double h) {
  return (f(r + h) - f(r - h)) / (2.0 * h);
}

// Fourth-order stencil for the tighter 1e-8 comparison: truncation and
// roundoff both land near 1e-10 on the Lennard-Jones range tested.
template <class F>
double fd_derivative4(F f, double r, double h) {
  return (8.0 * (f(r + h) - f(r - h)) - (f(r + 2 * h) - f(r - 2 * h))) /
         (12.0 * h);
}

bool close_rel(double a, double b, double rtol, double atol) {
  return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b)) + atol;
}

}  // namespace

TEST_CASE("lj energy hits the textbook anchor points") {
  LjParams p;
  p.energy_shifted = false;

  const double rmin = std::pow(2.0, 1.0 / 6.0);
  const PairTerm at_min = lj_eval(rmin * rmin, p);
  REQUIRE(at_min.energy == Catch::Approx(-1.0).margin(1e-12));
  REQUIRE(at_min.force_factor == Catch::Approx(0.0).margin(1e-12));

  const PairTerm at_sigma = lj_eval(1.0, p);
  REQUIRE(at_sigma.energy == 0.0);

  const PairTerm near_cut = lj_eval(2.5 * 2.5 * (1.0 - 1e-14), p);
  REQUIRE(near_cut.energy == Catch::Approx(-0.016316891).margin(5e-10));
}

TEST_CASE("lj is bit-exact zero at and beyond the cutoff") {
  LjParams p;
  const PairTerm beyond = lj_eval(3.0 * 3.0, p);
  REQUIRE(beyond.energy == 0.0);
  REQUIRE(beyond.force_factor == 0.0);
  const PairTerm at = lj_eval(2.5 * 2.5, p);
  REQUIRE(at.energy == 0.0);
  REQUIRE(at.force_factor == 0.0);
}

TEST_CASE("lj shift equals the unshifted energy at the cutoff") {
  LjParams p;
  p.energy_shifted = true;
  const LjPrepared q = lj_prepare(p);

  LjParams raw = p;
  raw.energy_shifted = false;
  const double rc2 = p.r_cut * p.r_cut;
  // Evaluate the unshifted formula at r_cut by stepping just inside.
  const PairTerm e = lj_eval(rc2 * (1.0 - 1e-13), raw);
  REQUIRE(q.shift == Catch::Approx(e.energy).margin(1e-11));

  // Shifted energy is continuous: approximately zero just inside the cutoff.
  const PairTerm shifted = lj_eval(rc2 * (1.0 - 1e-13), p);
  REQUIRE(std::abs(shifted.energy) < 1e-11);
}

TEST_CASE("lj force_factor equals -(1/r) dV/dr by finite differences") {
  LjParams p;
  p.energy_shifted = false;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(0.8, 2.5);
  auto energy_at = [&](double r) { return lj_eval(r * r, p).energy; };
  for (int t = 0; t < 100; ++t) {
    const double r = dist(rng);
    if (r * r >= p.r_cut * p.r_cut) continue;
    const double ff = lj_eval(r * r, p).force_factor;
    const double dvdr = fd_derivative4(energy_at, r, 1e-4 * r);
    REQUIRE(close_rel(ff, -dvdr / r, 1e-8, 1e-9));
  }
}

TEST_CASE("lj validation rejects bad parameters") {
  LjParams p;
  p.epsilon = 0.0;
  REQUIRE_THROWS_AS(validate_lj(p), ConfigError);
  p.epsilon = 1.0;
  p.sigma = -1.0;
  REQUIRE_THROWS_AS(validate_lj(p), ConfigError);
  p.sigma = 1.0;
  p.r_cut = 0.0;
  REQUIRE_THROWS_AS(validate_lj(p), ConfigError);
}

TEST_CASE("fene matches finite differences and tends to a linear spring") {
  FeneParams p;  // k=30, r_max=1.5
  auto energy_at = [&](double r) { return fene_eval(r * r, p).energy; };

  std::mt19937 rng(13);
  std::uniform_real_distribution<double> dist(0.05, 1.4);
  for (int t = 0; t < 100; ++t) {
    const double r = dist(rng);
    const double ff = fene_eval(r * r, p).force_factor;
    const double dvdr = fd_derivative(energy_at, r, 1e-6 * p.r_max);
    REQUIRE(close_rel(ff, -dvdr / r, 1e-6, 1e-10));
  }

  // Near zero extension the bond acts as a spring of stiffness k: the force
  // magnitude |ff * r| approaches k * r.
  const double tiny = 1e-8;
  const PairTerm t0 = fene_eval(tiny * tiny, p);
  REQUIRE(t0.force_factor == Catch::Approx(-p.k).epsilon(1e-9));
  REQUIRE(fene_eval(0.0, p).energy == 0.0);
}

TEST_CASE("fene overstretch raises a physics error") {
  FeneParams p;
  REQUIRE_THROWS_AS(fene_eval(1.5 * 1.5, p), PhysicsError);
  REQUIRE_THROWS_AS(fene_eval(2.0 * 2.0, p), PhysicsError);
  REQUIRE_NOTHROW(fene_eval(1.49 * 1.49, p));
}

TEST_CASE("angle energy and forces vanish at the rest angle") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(0.3, 2.8);
  for (int t = 0; t < 20; ++t) {
    AngleParams p;
    p.k = 2.5;
    p.theta0 = dist(rng);
    const Vec3 u{1.3, 0.0, 0.0};
    const Vec3 v{0.9 * std::cos(p.theta0), 0.9 * std::sin(p.theta0), 0.0};
    const AngleEval e = angle_eval(u, v, p);
    REQUIRE(std::abs(e.energy) < 1e-12);
    REQUIRE(norm(e.f_i) < 1e-12);
    REQUIRE(norm(e.f_j) < 1e-12);
    REQUIRE(norm(e.f_k) < 1e-12);
  }
}

TEST_CASE("collinear triple with theta0 = pi is the rest state") {
  AngleParams p;
  p.k = 1.5;
  p.theta0 = 3.14159265358979323846;
  const AngleEval e = angle_eval({1.0, 0.0, 0.0}, {-2.0, 0.0, 0.0}, p);
  REQUIRE(std::abs(e.energy) < 1e-12);
  REQUIRE(norm(e.f_i) < 1e-12);
  REQUIRE(norm(e.f_k) < 1e-12);
}

TEST_CASE("angle forces match finite differences of the energy") {
  AngleParams p;
  p.k = 1.0;
  p.theta0 = 0.0;
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  auto energy_of = [&](const Vec3& ri, const Vec3& rj, const Vec3& rk) {
    return angle_eval(ri - rj, rk - rj, p).energy;
  };

  for (int t = 0; t < 100; ++t) {
    Vec3 ri{dist(rng), dist(rng), dist(rng)};
    Vec3 rj{dist(rng), dist(rng), dist(rng)};
    Vec3 rk{dist(rng), dist(rng), dist(rng)};
    if (norm(ri - rj) < 0.2 || norm(rk - rj) < 0.2) continue;
    // Stay away from collinear configurations where FD itself degrades.
    const double c = dot(ri - rj, rk - rj) / (norm(ri - rj) * norm(rk - rj));
    if (std::abs(c) > 0.95) continue;

    const AngleEval e = angle_eval(ri - rj, rk - rj, p);
    const double h = 1e-6;
    Vec3* const points[3] = {&ri, &rj, &rk};
    const Vec3 forces[3] = {e.f_i, e.f_j, e.f_k};
    for (int a = 0; a < 3; ++a) {
      double* const comps[3] = {&points[a]->x, &points[a]->y, &points[a]->z};
      const double fvals[3] = {forces[a].x, forces[a].y, forces[a].z};
      for (int d = 0; d < 3; ++d) {
        const double orig = *comps[d];
        *comps[d] = orig + h;
        const double ep = energy_of(ri, rj, rk);
        *comps[d] = orig - h;
        const double em = energy_of(ri, rj, rk);
        *comps[d] = orig;
        REQUIRE(close_rel(fvals[d], -(ep - em) / (2.0 * h), 1e-6, 1e-8));
      }
    }
  }
}

TEST_CASE("angle forces conserve momentum and torque") {
  AngleParams p;
  p.k = 3.0;
  p.theta0 = 1.1;
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  for (int t = 0; t < 200; ++t) {
    const Vec3 u{dist(rng), dist(rng), dist(rng)};
    const Vec3 v{dist(rng), dist(rng), dist(rng)};
    if (norm(u) < 0.2 || norm(v) < 0.2) continue;
    const double c = dot(u, v) / (norm(u) * norm(v));
    if (std::abs(c) > 0.999) continue;
    const AngleEval e = angle_eval(u, v, p);

    const Vec3 fsum = e.f_i + e.f_j + e.f_k;
    REQUIRE(norm(fsum) < 1e-12);

    // Net torque about the middle particle.
    const Vec3 torque{
        u.y * e.f_i.z - u.z * e.f_i.y + v.y * e.f_k.z - v.z * e.f_k.y,
        u.z * e.f_i.x - u.x * e.f_i.z + v.z * e.f_k.x - v.x * e.f_k.z,
        u.x * e.f_i.y - u.y * e.f_i.x + v.x * e.f_k.y - v.y * e.f_k.x};
    REQUIRE(norm(torque) < 1e-12);
  }
}

TEST_CASE("angle rejects degenerate geometry") {
  AngleParams p;
  REQUIRE_THROWS_AS(angle_eval({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, p),
                    PhysicsError);
  p.theta0 = 1.0;  // off-axis rest angle: collinear input has no gradient
  REQUIRE_THROWS_AS(angle_eval({1.0, 0.0, 0.0}, {2.0, 0.0, 0.0}, p),
                    PhysicsError);
}

TEST_CASE("langevin force reduces to friction and is reproducible") {
  LangevinParams p;
  p.gamma = 0.0;
  p.temperature = 0.6;
  const Vec3 off = langevin_force({3.0, -1.0, 2.0}, 1.5, p, 0.005,
                                  {0.3, 0.4, 0.5});
  REQUIRE(off.x == 0.0);
  REQUIRE(off.y == 0.0);
  REQUIRE(off.z == 0.0);

  p.gamma = 1.0;
  p.temperature = 0.0;
  const Vec3 fric = langevin_force({1.0, 0.0, 0.0}, 1.0, p, 0.005,
                                   {0.3, 0.4, 0.5});
  REQUIRE(fric.x == Catch::Approx(-1.0));
  REQUIRE(fric.y == 0.0);
  REQUIRE(fric.z == 0.0);

  p.temperature = 0.6;
  const Vec3 a = langevin_force({1.0, 2.0, 3.0}, 1.0, p, 0.005, {0.1, 0.2, 0.3});
  const Vec3 b = langevin_force({1.0, 2.0, 3.0}, 1.0, p, 0.005, {0.1, 0.2, 0.3});
  REQUIRE(a.x == b.x);
  REQUIRE(a.y == b.y);
  REQUIRE(a.z == b.z);
}
