#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <set>
#include <vector>

#include "taskmd/random.hpp"
#include "taskmd/soa_store.hpp"

using namespace taskmd;

namespace {

ParticleRec rec(std::int64_t id, double x, double y = 0.0, double z = 0.0) {
  ParticleRec r;
  r.id = id;
  r.pos = {x, y, z};
  return r;
}

void check_invariants(const SoaStore& s) {
  const std::size_t n = s.id.size();
  REQUIRE(s.type.size() == n);
  REQUIRE(s.mass.size() == n);
  REQUIRE(s.px.size() == n);
  REQUIRE(s.fz.size() == n);

  std::size_t expect_begin = 0;
  for (const CellSpan& c : s.cells) {
    REQUIRE(c.begin == expect_begin);
    REQUIRE(c.begin % SoaStore::kChunk == 0);
    REQUIRE(c.real <= c.padded);
    REQUIRE(c.padded % SoaStore::kChunk == 0);
    for (std::size_t k = c.begin + c.real; k < c.begin + c.padded; ++k) {
      REQUIRE(s.id[k] == SoaStore::kSentinelId);
      REQUIRE(s.px[k] == SoaStore::kSentinelCoord);
    }
    expect_begin = c.begin + c.padded;
  }
  REQUIRE(s.sentinel_begin == expect_begin);
  REQUIRE(n == expect_begin + SoaStore::kChunk);
  for (std::size_t k = s.sentinel_begin; k < n; ++k) {
    REQUIRE(s.id[k] == SoaStore::kSentinelId);
  }
}

}  // namespace

TEST_CASE("build pads each cell to a chunk multiple") {
  std::vector<std::vector<ParticleRec>> cells(3);
  for (int i = 0; i < 3; ++i) cells[0].push_back(rec(i, i * 0.1));
  for (int i = 0; i < 8; ++i) cells[1].push_back(rec(10 + i, i * 0.1));
  // cell 2 stays empty

  SoaStore s = SoaStore::build(cells);
  check_invariants(s);
  REQUIRE(s.cells[0].real == 3);
  REQUIRE(s.cells[0].padded == 8);
  REQUIRE(s.cells[1].real == 8);
  REQUIRE(s.cells[1].padded == 8);
  REQUIRE(s.cells[2].real == 0);
  REQUIRE(s.cells[2].padded == 0);
  REQUIRE(s.real_total() == 11);
}

TEST_CASE("iterating real entries visits every id exactly once") {
  std::vector<std::vector<ParticleRec>> cells(5);
  int id = 0;
  for (int c = 0; c < 5; ++c) {
    for (int i = 0; i < c * 3 + 1; ++i) cells[c].push_back(rec(id++, 0.5 * i));
  }
  SoaStore s = SoaStore::build(cells);
  std::multiset<std::int64_t> seen;
  for (const CellSpan& c : s.cells) {
    for (std::size_t k = c.begin; k < c.begin + c.real; ++k) {
      seen.insert(s.id[k]);
    }
  }
  REQUIRE(seen.size() == static_cast<std::size_t>(id));
  for (int i = 0; i < id; ++i) REQUIRE(seen.count(i) == 1);
}

TEST_CASE("append grows a full cell by one chunk and keeps later cells") {
  std::vector<std::vector<ParticleRec>> cells(2);
  for (int i = 0; i < 8; ++i) cells[0].push_back(rec(i, 1.0 * i));
  cells[1].push_back(rec(100, 42.0));

  SoaStore s = SoaStore::build(cells);
  REQUIRE(s.cells[0].padded == 8);

  s.append(0, rec(8, 8.0));
  check_invariants(s);
  REQUIRE(s.cells[0].real == 9);
  REQUIRE(s.cells[0].padded == 16);
  REQUIRE(s.cells[1].begin == 16);
  // The particle that lived in cell 1 is untouched.
  REQUIRE(s.id[s.cells[1].begin] == 100);
  REQUIRE(s.px[s.cells[1].begin] == 42.0);
}

TEST_CASE("remove swaps the last live entry in and re-sentinels the slot") {
  std::vector<std::vector<ParticleRec>> cells(1);
  for (int i = 0; i < 5; ++i) cells[0].push_back(rec(i, 1.0 * i));
  SoaStore s = SoaStore::build(cells);

  s.remove(0, 1);  // id 1 leaves, id 4 takes its place
  REQUIRE(s.cells[0].real == 4);
  REQUIRE(s.cells[0].padded == 8);
  REQUIRE(s.id[1] == 4);
  REQUIRE(s.id[4] == SoaStore::kSentinelId);
  REQUIRE(s.px[4] == SoaStore::kSentinelCoord);

  REQUIRE_THROWS_AS(s.remove(0, 4), StateError);
}

TEST_CASE("kinetic energy and temperature follow the direct formula") {
  std::vector<std::vector<ParticleRec>> cells(1);
  ParticleRec p = rec(0, 0.0);
  p.vel = {1.0, 0.0, 0.0};
  cells[0].push_back(p);
  SoaStore s = SoaStore::build(cells);

  const KineticResult r = kinetic_energy_and_temperature(s);
  REQUIRE(r.kinetic == Catch::Approx(0.5));
  REQUIRE(r.temperature() == Catch::Approx(1.0 / 3.0));

  // All velocities zero.
  std::vector<std::vector<ParticleRec>> cells2(1);
  cells2[0].push_back(rec(0, 0.0));
  cells2[0].push_back(rec(1, 1.0));
  const KineticResult z = kinetic_energy_and_temperature(SoaStore::build(cells2));
  REQUIRE(z.kinetic == 0.0);
  REQUIRE(z.temperature() == 0.0);

  REQUIRE_THROWS_AS(kinetic_energy_and_temperature(SoaStore::build({})),
                    ConfigError);
}

TEST_CASE("Maxwell-Boltzmann sampled velocities reproduce the temperature") {
  const double T = 0.6;
  std::vector<std::vector<ParticleRec>> cells(1);
  for (int i = 0; i < 1000; ++i) {
    ParticleRec p = rec(i, 0.1 * i);
    const Vec3 z = counter_normal3(5, RngContext::kVelocityInit, 0, i);
    p.vel = std::sqrt(T / p.mass) * z;
    cells[0].push_back(p);
  }
  SoaStore s = SoaStore::build(cells);
  const KineticResult r = kinetic_energy_and_temperature(s);
  REQUIRE(r.temperature() == Catch::Approx(T).epsilon(0.05));
}
