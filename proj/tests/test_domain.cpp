#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <map>
#include <vector>

#include "taskmd/domain.hpp"
#include "taskmd/oracle.hpp"
#include "taskmd/random.hpp"

using namespace taskmd;

namespace {

FlatConfig random_flat(std::size_t n, double edge, std::uint64_t seed) {
  FlatConfig f;
  f.box = BoxSpec::cubic(edge);
  for (std::size_t k = 0; k < n; ++k) {
    ParticleRec rec;
    rec.id = static_cast<std::int64_t>(k);
    const Vec3 u = counter_uniform3(seed, RngContext::kPlacement, 0, rec.id);
    rec.pos = {u.x * edge, u.y * edge, u.z * edge};
    const Vec3 v =
        counter_uniform3(seed, RngContext::kVelocityInit, 0, rec.id);
    rec.vel = {v.x - 0.5, v.y - 0.5, v.z - 0.5};
    f.push(rec);
  }
  return f;
}

Interactions lj_only() {
  Interactions inter;
  inter.lj = LjParams{1.0, 1.0, 2.5, true};
  return inter;
}

// Force on every owned particle, by id, after a full force pass through the
// decomposed path: zeroed accumulators, pair and bonded terms per subnode,
// ghost contributions routed home.
std::map<std::int64_t, Vec3> domain_forces(Domain& d) {
  for (Subnode& sn : d.subs) {
    std::fill(sn.store.fx.begin(), sn.store.fx.end(), 0.0);
    std::fill(sn.store.fy.begin(), sn.store.fy.end(), 0.0);
    std::fill(sn.store.fz.begin(), sn.store.fz.end(), 0.0);
  }
  for (int s = 0; s < d.n_sub(); ++s) {
    compute_pair_forces(d.nlists[s], d.subs[s].store, d.lj_prep);
    compute_bonded_forces(d.subs[s], d.terms[s], d.inter.fene, d.inter.angle);
  }
  for (int s = 0; s < d.n_sub(); ++s) collect_ghost_forces(d.plan, d.subs, s);

  std::map<std::int64_t, Vec3> out;
  for (const Subnode& sn : d.subs) {
    for (std::int32_t c : sn.interior) {
      const CellSpan& span = sn.store.cells[c];
      for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
        out[sn.store.id[k]] = sn.store.force(k);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("build and flatten round-trip the snapshot") {
  const FlatConfig f = random_flat(120, 9.4, 11);
  for (int n_sub : {1, 8}) {
    Domain d = build_domain(f, lj_only(), 0.3, n_sub);
    REQUIRE(d.n_sub() == n_sub);
    REQUIRE(d.n_particles == f.size());

    const FlatConfig back = flatten_domain(d);
    REQUIRE(back.size() == f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
      REQUIRE(back.id[k] == f.id[k]);
      REQUIRE(back.mass[k] == f.mass[k]);
      REQUIRE(back.type[k] == f.type[k]);
      const Vec3 w = wrap_position(f.pos[k], f.box);
      REQUIRE(back.pos[k].x == w.x);
      REQUIRE(back.pos[k].y == w.y);
      REQUIRE(back.pos[k].z == w.z);
      REQUIRE(back.vel[k].x == f.vel[k].x);
      REQUIRE(back.vel[k].y == f.vel[k].y);
      REQUIRE(back.vel[k].z == f.vel[k].z);
    }
  }
}

TEST_CASE("resort leaves a settled domain unchanged") {
  const FlatConfig f = random_flat(150, 9.4, 23);
  Domain d = build_domain(f, lj_only(), 0.3, 8);
  const FlatConfig before = flatten_domain(d);
  resort_domain(d);
  rebuild_all_lists(d);
  const FlatConfig after = flatten_domain(d);
  REQUIRE(after.size() == before.size());
  for (std::size_t k = 0; k < before.size(); ++k) {
    REQUIRE(after.id[k] == before.id[k]);
    REQUIRE(after.pos[k].x == before.pos[k].x);
    REQUIRE(after.pos[k].y == before.pos[k].y);
    REQUIRE(after.pos[k].z == before.pos[k].z);
  }
}

TEST_CASE("ghost cells mirror their source cells shifted") {
  const FlatConfig f = random_flat(200, 12.0, 7);
  Domain d = build_domain(f, lj_only(), 0.5, 4);

  auto check_mirrors = [&] {
    for (const GhostRecord& rec : d.plan.records) {
      const SoaStore& src = d.subs[rec.src_sub].store;
      const SoaStore& dst = d.subs[rec.dst_sub].store;
      const CellSpan& sc = src.cells[rec.src_cell];
      const CellSpan& dc = dst.cells[rec.dst_cell];
      REQUIRE(sc.real == dc.real);
      for (std::size_t k = 0; k < sc.real; ++k) {
        REQUIRE(dst.id[dc.begin + k] == src.id[sc.begin + k]);
        REQUIRE(dst.px[dc.begin + k] == src.px[sc.begin + k] + rec.shift.x);
        REQUIRE(dst.py[dc.begin + k] == src.py[sc.begin + k] + rec.shift.y);
        REQUIRE(dst.pz[dc.begin + k] == src.pz[sc.begin + k] + rec.shift.z);
      }
    }
  };
  check_mirrors();

  // Drift every owned particle a little (well under a cell) and refresh.
  for (Subnode& sn : d.subs) {
    for (std::int32_t c : sn.interior) {
      const CellSpan& span = sn.store.cells[c];
      for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
        sn.store.px[k] += 0.01;
        sn.store.py[k] -= 0.02;
      }
    }
  }
  for (int s = 0; s < d.n_sub(); ++s) update_ghost_positions(d.plan, d.subs, s);
  check_mirrors();
}

TEST_CASE("ghost forces are routed back to their owners and cleared") {
  const FlatConfig f = random_flat(150, 12.0, 31);
  Domain d = build_domain(f, lj_only(), 0.5, 4);

  for (Subnode& sn : d.subs) {
    std::fill(sn.store.fx.begin(), sn.store.fx.end(), 0.0);
    std::fill(sn.store.fy.begin(), sn.store.fy.end(), 0.0);
    std::fill(sn.store.fz.begin(), sn.store.fz.end(), 0.0);
  }

  // Expected per-id tallies: one unit of force per ghost image.
  std::map<std::int64_t, int> images;
  for (Subnode& sn : d.subs) {
    for (int l = 0; l < sn.lcells(); ++l) {
      if (!sn.ghost[l]) continue;
      const CellSpan& span = sn.store.cells[l];
      for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
        sn.store.fx[k] = 1.0;
        images[sn.store.id[k]] += 1;
      }
    }
  }

  for (int s = 0; s < d.n_sub(); ++s) collect_ghost_forces(d.plan, d.subs, s);

  for (const Subnode& sn : d.subs) {
    for (int l = 0; l < sn.lcells(); ++l) {
      const CellSpan& span = sn.store.cells[l];
      for (std::size_t k = span.begin; k < span.begin + span.real; ++k) {
        if (sn.ghost[l]) {
          REQUIRE(sn.store.fx[k] == 0.0);
        } else {
          const auto it = images.find(sn.store.id[k]);
          const double want = it == images.end() ? 0.0 : it->second;
          REQUIRE(sn.store.fx[k] == want);
        }
      }
    }
  }
}

TEST_CASE("decomposed forces match the reference for a dense fluid") {
  // Jittered lattice: dense enough to exercise many pairs, but no two
  // particles closer than ~0.9, so forces stay moderate and the comparison
  // below is limited by summation order, not by cancellation.
  FlatConfig f;
  f.box = BoxSpec::cubic(8.0);
  const int side = 6;
  const double spacing = 8.0 / side;
  std::int64_t id = 0;
  for (int ix = 0; ix < side; ++ix) {
    for (int iy = 0; iy < side; ++iy) {
      for (int iz = 0; iz < side; ++iz) {
        ParticleRec rec;
        rec.id = id;
        const Vec3 u = counter_uniform3(47, RngContext::kPlacement, 0, id);
        rec.pos = {(ix + 0.5) * spacing + 0.2 * (u.x - 0.5),
                   (iy + 0.5) * spacing + 0.2 * (u.y - 0.5),
                   (iz + 0.5) * spacing + 0.2 * (u.z - 0.5)};
        f.push(rec);
        ++id;
      }
    }
  }

  const OracleResult ref = oracle_forces_energy(f, lj_only());
  for (int n_sub : {1, 8}) {
    Domain d = build_domain(f, lj_only(), 0.3, n_sub);
    auto got = domain_forces(d);
    REQUIRE(got.size() == f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
      const Vec3 g = got[f.id[k]];
      CHECK(std::abs(g.x - ref.force[k].x) <= 1e-10);
      CHECK(std::abs(g.y - ref.force[k].y) <= 1e-10);
      CHECK(std::abs(g.z - ref.force[k].z) <= 1e-10);
    }
  }
}

TEST_CASE("bonded terms spanning subnode boundaries match the reference") {
  FlatConfig f;
  f.box = BoxSpec::cubic(16.8);
  // A bent trimer straddling the x-interface at 8.4 plus one far spectator.
  const Vec3 sites[4] = {{7.6, 8.0, 8.0},
                         {8.3, 8.4, 8.0},
                         {9.0, 8.1, 8.3},
                         {2.0, 2.0, 2.0}};
  for (int k = 0; k < 4; ++k) {
    ParticleRec rec;
    rec.id = k;
    rec.pos = sites[k];
    f.push(rec);
  }
  f.topo.bonds = {{0, 1}, {1, 2}};
  f.topo.angles = {{0, 1, 2}};

  Interactions inter = lj_only();
  inter.fene = FeneParams{30.0, 1.5};
  inter.angle = AngleParams{2.0, 1.9};

  const OracleResult ref = oracle_forces_energy(f, inter);
  for (int n_sub : {1, 2, 4}) {
    Domain d = build_domain(f, inter, 0.3, n_sub);
    auto got = domain_forces(d);
    for (std::size_t k = 0; k < f.size(); ++k) {
      const Vec3 g = got[f.id[k]];
      CHECK(std::abs(g.x - ref.force[k].x) <= 2e-6);
      CHECK(std::abs(g.y - ref.force[k].y) <= 2e-6);
      CHECK(std::abs(g.z - ref.force[k].z) <= 2e-6);
    }
  }
}

TEST_CASE("a bonded partner outside the ghost shell is reported") {
  FlatConfig f;
  f.box = BoxSpec::cubic(15.0);
  ParticleRec a;
  a.id = 0;
  a.pos = {1.5, 7.5, 7.5};
  ParticleRec b;
  b.id = 1;
  b.pos = {7.5, 7.5, 7.5};
  f.push(a);
  f.push(b);
  f.topo.bonds = {{0, 1}};

  Interactions inter = lj_only();
  inter.fene = FeneParams{30.0, 1.5};

  // Five cells across, five slabs: cell 2 is outside slab 0's ghost shell.
  CHECK_THROWS_AS(build_domain(f, inter, 0.5, 5), PhysicsError);
  CHECK_THROWS_WITH(build_domain(f, inter, 0.5, 5),
                    Catch::Matchers::ContainsSubstring("out of reach"));
}

TEST_CASE("bonded resolution rejects ids nobody owns") {
  const FlatConfig f = random_flat(20, 9.4, 3);
  Domain d = build_domain(f, lj_only(), 0.3, 1);
  Topology bad;
  bad.bonds = {{999, 0}};
  CHECK_THROWS_AS(resolve_bonded(bad, d.subs), StateError);

  // A known anchor whose partner id exists nowhere fails the proximity
  // search instead.
  bad.bonds = {{0, 999}};
  CHECK_THROWS_AS(resolve_bonded(bad, d.subs), PhysicsError);
}

TEST_CASE("domain construction validates its inputs") {
  FlatConfig f = random_flat(30, 9.4, 5);

  SECTION("bonds without bond parameters") {
    f.topo.bonds = {{0, 1}};
    CHECK_THROWS_AS(build_domain(f, lj_only(), 0.3, 1), ConfigError);
  }
  SECTION("angles without angle parameters") {
    f.topo.angles = {{0, 1, 2}};
    Interactions inter = lj_only();
    inter.fene = FeneParams{30.0, 1.5};
    CHECK_THROWS_AS(build_domain(f, inter, 0.3, 1), ConfigError);
  }
  SECTION("bond range wider than the ghost shell") {
    f.topo.bonds = {{0, 1}};
    Interactions inter = lj_only();
    inter.fene = FeneParams{30.0, 3.1};
    // Particles 0 and 1 may sit far apart here; the setup check must fire
    // before any distance is measured.
    CHECK_THROWS_WITH(build_domain(f, inter, 0.3, 1),
                      Catch::Matchers::ContainsSubstring("ghost shell"));
  }
  SECTION("negative skin") {
    CHECK_THROWS_AS(build_domain(f, lj_only(), -0.1, 1), ConfigError);
  }
  SECTION("topology naming an absent particle") {
    f.topo.bonds = {{0, 999}};
    Interactions inter = lj_only();
    inter.fene = FeneParams{30.0, 1.5};
    CHECK_THROWS_AS(build_domain(f, inter, 0.3, 1), ConfigError);
  }
  SECTION("non-finite position") {
    f.pos[4].y = std::nan("");
    CHECK_THROWS_AS(build_domain(f, lj_only(), 0.3, 1), PhysicsError);
  }
}

TEST_CASE("kinetic energy sums over owned particles only") {
  FlatConfig f = random_flat(60, 9.4, 9);
  double want = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    want += 0.5 * f.mass[k] * norm2(f.vel[k]);
  }
  for (int n_sub : {1, 8}) {
    Domain d = build_domain(f, lj_only(), 0.3, n_sub);
    const KineticResult kin = domain_kinetic(d);
    CHECK(kin.count == f.size());
    CHECK(kin.kinetic == Catch::Approx(want).epsilon(1e-12));
  }
}
