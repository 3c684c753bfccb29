#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "taskmd/cell_grid.hpp"

using namespace taskmd;

TEST_CASE("cell grid dimensions floor the box over the verlet radius") {
  const CellGrid g =
      build_cell_grid(BoxSpec::cubic(67.7177), 2.5, 0.3);
  CHECK(g.dims[0] == 24);
  CHECK(g.dims[1] == 24);
  CHECK(g.dims[2] == 24);
  CHECK(g.ncells() == 24 * 24 * 24);
  CHECK(g.r_verlet == Catch::Approx(2.8));
  CHECK(g.cell_len.x >= g.r_verlet);
  CHECK(g.cell_len.y >= g.r_verlet);
  CHECK(g.cell_len.z >= g.r_verlet);
}

TEST_CASE("anisotropic boxes get per-axis dimensions") {
  const CellGrid g = build_cell_grid({{12.0, 6.0, 30.0}}, 2.5, 0.5);
  CHECK(g.dims[0] == 4);
  CHECK(g.dims[1] == 2);
  CHECK(g.dims[2] == 10);
  CHECK(g.cell_len.x == Catch::Approx(3.0));
  CHECK(g.cell_len.y == Catch::Approx(3.0));
  CHECK(g.cell_len.z == Catch::Approx(3.0));
}

TEST_CASE("a box thinner than one interaction range is rejected") {
  CHECK_THROWS_AS(build_cell_grid({{2.0, 10.0, 10.0}}, 2.5, 0.3),
                  ConfigError);
  CHECK_THROWS_AS(build_cell_grid(BoxSpec::cubic(10.0), 0.0, 0.3),
                  ConfigError);
  CHECK_THROWS_AS(build_cell_grid(BoxSpec::cubic(10.0), 2.5, -0.1),
                  ConfigError);
}

TEST_CASE("linear index and coordinates invert each other") {
  const CellGrid g = build_cell_grid({{12.0, 9.0, 15.0}}, 2.5, 0.5);
  for (int z = 0; z < g.dims[2]; ++z) {
    for (int y = 0; y < g.dims[1]; ++y) {
      for (int x = 0; x < g.dims[0]; ++x) {
        const int lin = g.linear(x, y, z);
        const auto c = g.coords(lin);
        REQUIRE(c[0] == x);
        REQUIRE(c[1] == y);
        REQUIRE(c[2] == z);
      }
    }
  }
}

TEST_CASE("binning clamps positions on the upper box face") {
  const CellGrid g = build_cell_grid(BoxSpec::cubic(12.0), 2.5, 0.5);
  // 12.0/3.0 would be cell 4 of [0,3]; the clamp keeps it in the last cell.
  const auto c = g.cell_coords({12.0 - 1e-13, 0.0, 6.0});
  CHECK(c[0] == 3);
  CHECK(c[1] == 0);
  CHECK(c[2] == 2);
  CHECK(g.cell_of({0.0, 0.0, 0.0}) == 0);
}

TEST_CASE("bin_particles wraps positions and conserves every particle") {
  const CellGrid g = build_cell_grid(BoxSpec::cubic(12.0), 2.5, 0.5);
  std::vector<std::vector<ParticleRec>> seed(1);
  for (int k = 0; k < 50; ++k) {
    ParticleRec r;
    r.id = k;
    // Deliberately out-of-box coordinates in both directions.
    r.pos = {-5.0 + 0.7 * k, 25.0 - 0.9 * k, 0.31 * k};
    seed[0].push_back(r);
  }
  const SoaStore flat = SoaStore::build(seed);
  const SoaStore binned = bin_particles(flat, g);

  REQUIRE(binned.cells.size() == static_cast<std::size_t>(g.ncells()));
  std::size_t total = 0;
  for (std::size_t c = 0; c < binned.cells.size(); ++c) {
    const CellSpan& span = binned.cells[c];
    total += span.real;
    for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
      const Vec3 p = binned.position(k);
      REQUIRE(p.x >= 0.0);
      REQUIRE(p.x < 12.0);
      REQUIRE(p.y >= 0.0);
      REQUIRE(p.y < 12.0);
      REQUIRE(p.z >= 0.0);
      REQUIRE(p.z < 12.0);
      REQUIRE(g.cell_of(p) == static_cast<int>(c));
    }
  }
  CHECK(total == 50);
}

TEST_CASE("non-finite positions are rejected at binning") {
  const CellGrid g = build_cell_grid(BoxSpec::cubic(12.0), 2.5, 0.5);
  std::vector<std::vector<ParticleRec>> seed(1);
  ParticleRec r;
  r.id = 7;
  r.pos = {std::nan(""), 1.0, 1.0};
  seed[0].push_back(r);
  const SoaStore flat = SoaStore::build(seed);
  CHECK_THROWS_AS(bin_particles(flat, g), PhysicsError);
}
