#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "taskmd/box.hpp"

using namespace taskmd;

namespace {

// Independent reference: scan integer image offsets and keep the shortest.
double min_image_by_scan(double d, double length) {
  double best = d;
  for (int m = -3; m <= 3; ++m) {
    const double cand = d - m * length;
    if (std::abs(cand) < std::abs(best)) best = cand;
  }
  return best;
}

}  // namespace

TEST_CASE("minimum_image matches hand cases") {
  const BoxSpec box = BoxSpec::cubic(10.0);

  const Vec3 a = minimum_image({0.0, 0.0, 0.0}, box);
  REQUIRE(a.x == 0.0);
  REQUIRE(a.y == 0.0);
  REQUIRE(a.z == 0.0);

  const Vec3 b = minimum_image({6.0, 0.0, 0.0}, box);
  REQUIRE(b.x == Catch::Approx(-4.0).margin(1e-12));

  const Vec3 c = minimum_image({-5.1, 4.9, 12.0}, box);
  REQUIRE(c.x == Catch::Approx(4.9).margin(1e-12));
  REQUIRE(c.y == Catch::Approx(4.9).margin(1e-12));
  REQUIRE(c.z == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("minimum_image equals exhaustive image scan") {
  const BoxSpec box{{10.0, 20.0, 7.5}};
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(-25.0, 25.0);
  for (int t = 0; t < 1000; ++t) {
    const Vec3 d{dist(rng), dist(rng), dist(rng)};
    const Vec3 m = minimum_image(d, box);
    REQUIRE(std::abs(m.x) ==
            Catch::Approx(std::abs(min_image_by_scan(d.x, 10.0))).margin(1e-12));
    REQUIRE(std::abs(m.y) ==
            Catch::Approx(std::abs(min_image_by_scan(d.y, 20.0))).margin(1e-12));
    REQUIRE(std::abs(m.z) ==
            Catch::Approx(std::abs(min_image_by_scan(d.z, 7.5))).margin(1e-12));
  }
}

TEST_CASE("minimum_image is idempotent and half-open at the boundary") {
  const BoxSpec box = BoxSpec::cubic(10.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int t = 0; t < 1000; ++t) {
    const Vec3 d{dist(rng), dist(rng), dist(rng)};
    const Vec3 once = minimum_image(d, box);
    const Vec3 twice = minimum_image(once, box);
    REQUIRE(once.x == twice.x);
    REQUIRE(once.y == twice.y);
    REQUIRE(once.z == twice.z);
    REQUIRE(once.x >= -5.0);
    REQUIRE(once.x < 5.0);
  }
  // Exactly half the box maps to the negative end and stays there.
  const Vec3 h = minimum_image({5.0, -5.0, 15.0}, box);
  REQUIRE(h.x == -5.0);
  REQUIRE(h.y == -5.0);
  REQUIRE(h.z == -5.0);
  const Vec3 hh = minimum_image(h, box);
  REQUIRE(hh.x == -5.0);
}

TEST_CASE("wrap_position matches hand cases") {
  const BoxSpec box{{10.0, 20.0, 30.0}};
  const Vec3 a = wrap_position({0.0, 0.0, 0.0}, box);
  REQUIRE(a.x == 0.0);

  const Vec3 b = wrap_position({10.0, 0.0, 0.0}, BoxSpec::cubic(10.0));
  REQUIRE(b.x == 0.0);

  const Vec3 c = wrap_position({-0.5, 23.2, 5.0}, box);
  REQUIRE(c.x == Catch::Approx(9.5).margin(1e-12));
  REQUIRE(c.y == Catch::Approx(3.2).margin(1e-12));
  REQUIRE(c.z == Catch::Approx(5.0).margin(1e-12));
}

TEST_CASE("wrap_position lands in [0, L) and shifts by multiples of L") {
  const BoxSpec box{{10.0, 20.0, 7.5}};
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-100.0, 100.0);
  for (int t = 0; t < 1000; ++t) {
    const Vec3 p{dist(rng), dist(rng), dist(rng)};
    const Vec3 w = wrap_position(p, box);
    REQUIRE(w.x >= 0.0);
    REQUIRE(w.x < 10.0);
    REQUIRE(w.y >= 0.0);
    REQUIRE(w.y < 20.0);
    REQUIRE(w.z >= 0.0);
    REQUIRE(w.z < 7.5);
    // The residual displacement reduces to (almost exactly) zero.
    const Vec3 d = minimum_image(w - p, box);
    REQUIRE(std::abs(d.x) < 1e-9);
    REQUIRE(std::abs(d.y) < 1e-9);
    REQUIRE(std::abs(d.z) < 1e-9);
  }
  // A tiny negative coordinate must not wrap to L itself.
  const Vec3 e = wrap_position({-1e-18, 0.0, 0.0}, box);
  REQUIRE(e.x >= 0.0);
  REQUIRE(e.x < 10.0);
}

TEST_CASE("validate_box rejects non-positive lengths") {
  REQUIRE_THROWS_AS(validate_box(BoxSpec{{0.0, 1.0, 1.0}}), ConfigError);
  REQUIRE_THROWS_AS(validate_box(BoxSpec{{1.0, -2.0, 1.0}}), ConfigError);
}
