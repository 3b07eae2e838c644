#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "covsim/constraints.hpp"
#include "covsim/errors.hpp"

using namespace covsim;

namespace {

ConstraintSpec spec100() {
  ConstraintSpec s;
  s.domain = DomainRect{0, 100, 0, 100};
  return s;  // h_min 2, h_max 60, d_sep 2
}

}  // namespace

TEST_CASE("feasibility predicate") {
  const HeightField flat = flat_field(DomainRect{0, 100, 0, 100}, 0.0);
  const ConstraintSpec spec = spec100();

  SUBCASE("altitude band is inclusive at both ends") {
    TeamConfig t(3, 1);
    t.col(0) = Vec3(10, 10, spec.h_min);
    CHECK(is_feasible(t, flat, spec));
    t.col(0) = Vec3(10, 10, spec.h_max);
    CHECK(is_feasible(t, flat, spec));
    t.col(0) = Vec3(10, 10, spec.h_min - 1e-6);
    CHECK_FALSE(is_feasible(t, flat, spec));
    t.col(0) = Vec3(10, 10, spec.h_max + 1e-6);
    CHECK_FALSE(is_feasible(t, flat, spec));
  }

  SUBCASE("co-located agents violate separation") {
    TeamConfig t(3, 2);
    t.col(0) = Vec3(10, 10, 5);
    t.col(1) = Vec3(10, 10, 5);
    CHECK_FALSE(is_feasible(t, flat, spec));
  }

  SUBCASE("agent under the terrain is infeasible") {
    TeamConfig t(3, 1);
    t.col(0) = Vec3(10, 10, -3);
    CHECK_FALSE(is_feasible(t, flat, spec));
  }

  SUBCASE("agent outside the domain is infeasible") {
    TeamConfig t(3, 1);
    t.col(0) = Vec3(101, 10, 5);
    CHECK_FALSE(is_feasible(t, flat, spec));
  }

  SUBCASE("permutation invariance") {
    TeamConfig t(3, 3);
    t.col(0) = Vec3(10, 10, 5);
    t.col(1) = Vec3(20, 10, 5);
    t.col(2) = Vec3(10, 20, 61);  // too high
    TeamConfig p(3, 3);
    p.col(0) = t.col(2);
    p.col(1) = t.col(0);
    p.col(2) = t.col(1);
    CHECK(is_feasible(t, flat, spec) == is_feasible(p, flat, spec));
  }
}

TEST_CASE("repair") {
  const DomainRect domain{0, 100, 0, 100};
  const HeightField flat = flat_field(domain, 0.0);
  const ConstraintSpec spec = spec100();

  SUBCASE("on-surface points are lifted to exactly h_min") {
    GaussianMixtureSpec g;
    g.domain = domain;
    g.components = {{{50, 50}, 20.0, 12.0}};
    const HeightField terrain = generate_terrain(g);
    TeamConfig t(3, 2);
    t.col(0) = Vec3(30, 30, terrain(30, 30));
    t.col(1) = Vec3(60, 60, terrain(60, 60));
    const TeamConfig r = repair(t, terrain, spec);
    CHECK(r(2, 0) == terrain(30, 30) + spec.h_min);
    CHECK(r(2, 1) == terrain(60, 60) + spec.h_min);
    CHECK(is_feasible(r, terrain, spec));
  }

  SUBCASE("feasible input comes back unchanged") {
    TeamConfig t(3, 2);
    t.col(0) = Vec3(10, 10, 5);
    t.col(1) = Vec3(40, 40, 30);
    const TeamConfig r = repair(t, flat, spec);
    CHECK((r - t).norm() == 0.0);
  }

  SUBCASE("stacked agents are spread to pairwise separation") {
    TeamConfig t(3, 6);
    for (int i = 0; i < 6; ++i) t.col(i) = Vec3(50, 50, 2);
    const TeamConfig r = repair(t, flat, spec);
    CHECK(is_feasible(r, flat, spec));
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) CHECK((r.col(i) - r.col(j)).norm() >= spec.d_sep);
  }

  SUBCASE("repair is idempotent on its own output") {
    TeamConfig t(3, 4);
    t.col(0) = Vec3(-5, 50, 0);
    t.col(1) = Vec3(-5, 50, 0);
    t.col(2) = Vec3(105, 50, 100);
    t.col(3) = Vec3(50, -3, 1);
    const TeamConfig r = repair(t, flat, spec);
    CHECK(is_feasible(r, flat, spec));
    const TeamConfig r2 = repair(r, flat, spec);
    CHECK((r2 - r).norm() == 0.0);
  }

  SUBCASE("impossible separation raises RepairFailure") {
    ConstraintSpec tight = spec;
    tight.domain = DomainRect{0, 1, 0, 1};
    tight.d_sep = 10.0;
    TeamConfig t(3, 3);
    t.col(0) = Vec3(0.1, 0.1, 2);
    t.col(1) = Vec3(0.5, 0.5, 2);
    t.col(2) = Vec3(0.9, 0.9, 2);
    const HeightField tiny = flat_field(tight.domain, 0.0);
    CHECK_THROWS_AS(repair(t, tiny, tight), RepairFailure);
  }
}
