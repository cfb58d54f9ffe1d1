#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "qmx/error.hpp"
#include "qmx/meixner.hpp"
#include "qmx/verify.hpp"

using namespace qmx;
using doctest::Approx;

namespace {

const PointResult& find(const RelationReport& r, int n, int x, double q, int beta, double theta) {
  for (const PointResult& p : r.points)
    if (p.point.n == n && p.point.x == x && p.point.q == q && p.point.beta == beta && p.point.theta == theta) return p;
  FAIL("grid point not found");
  return r.points.front();
}

Grid small_grid() {
  Grid g;
  g.q = {0.5};
  g.beta = {1, 2};
  g.theta = {0.7};
  g.n = {0, 1, 2, 3};
  g.x = {0, 1, 2, 3};
  g.z = {0.2};
  return g;
}

}  // namespace

TEST_CASE("registry") {
  CHECK(all_relations().size() == 20);
  std::set<std::string_view> names;
  for (RelationId id : all_relations()) {
    names.insert(relation_name(id));
    CHECK(parse_relation(relation_name(id)) == id);
  }
  CHECK(names.size() == 20);
  try {
    parse_relation("NOT_A_RELATION");
    FAIL("expected UnknownRelation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownRelation);
  }
}

TEST_CASE("empty grids and filters") {
  Grid g = small_grid();
  g.n.clear();
  try {
    check(RelationId::Recurrence, g, 1e-9);
    FAIL("expected EmptyGrid");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyGrid);
  }
  TolProfile p;
  p.relations = {RelationId::Recurrence};
  p.grid = small_grid();
  const auto reports = check_all(p);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].id == RelationId::Recurrence);
  CHECK(reports[0].points.size() == 1 * 2 * 1 * 4 * 4);
}

TEST_CASE("vanishing coefficients at the edge of the grid") {
  const RelationReport rec = check(RelationId::Recurrence, small_grid(), 1e-9);
  for (const PointResult& p : rec.points)
    if (p.point.n == 0) CHECK(p.abs_residual <= 1e-14);
  const RelationReport diff = check(RelationId::Difference, small_grid(), 1e-9);
  for (const PointResult& p : diff.points)
    if (p.point.x == 0) CHECK(p.abs_residual <= 1e-14);
}

TEST_CASE("degree orthogonality against a brute-force sum") {
  Grid g;
  g.q = {0.5};
  g.beta = {1};
  g.theta = {1.0};
  g.n = {0};
  g.x = {0};
  const RelationReport r = check(RelationId::OrthoDegree, g, 1e-9);
  long double s = 0;
  for (int x = 0; x < 200; ++x) s += oracle::weight(x, 1, 1.0L, 0.5L);
  CHECK(r.points[0].lhs == Approx(double(s)).epsilon(1e-14));
  CHECK(r.points[0].rhs == Approx(1.0).epsilon(1e-15));
  CHECK(r.passed);
}

TEST_CASE("domain restrictions are reported per point") {
  const RelationReport cb = check(RelationId::CompBackward, small_grid(), 1e-9);
  for (const PointResult& p : cb.points) CHECK(p.domain_violation == (p.point.beta == 1));
  CHECK(cb.domain_violations == 16);
  CHECK(cb.passed);

  Grid g = small_grid();
  g.z = {0.6};
  const RelationReport gv = check(RelationId::GenfunVariable, g, 1e-9);
  for (const PointResult& p : gv.points) CHECK(p.domain_violation == (0.6 * std::pow(0.5, -p.point.n) > 0.9));
}

TEST_CASE("every relation except the dual orthogonality holds on the default grid") {
  const auto reports = check_all(TolProfile{});
  REQUIRE(reports.size() == 20);
  for (const RelationReport& r : reports) {
    CAPTURE(relation_name(r.id));
    CAPTURE(r.max_residual);
    if (r.id == RelationId::OrthoVariable) continue;
    CHECK(r.passed);
    for (const PointResult& p : r.points) CHECK(p.tail_budget >= 0.0);
  }
}

TEST_CASE("dual orthogonality misses part of the mass") {
  // sum_n xi_{n,x}^2 = omega_x * (the dual sum); 0.5461 at q = 1/2, theta = 0.7, beta = 1, x = 1,
  // from a 40-digit evaluation with the n-sum converged.
  Grid g = small_grid();
  g.beta = {1};
  const RelationReport r = check(RelationId::OrthoVariable, g, 1e-9);
  CHECK_FALSE(r.passed);
  const PointResult& p = find(r, 1, 1, 0.5, 1, 0.7);
  const double w = weight(1, MatrixElementParams(0.7, 1, QContext(0.5)));
  CHECK(p.lhs * w == Approx(0.5461).epsilon(1e-3));
  // Off-diagonal pairs are not orthogonal either.
  CHECK(find(r, 0, 2, 0.5, 1, 0.7).rel_residual > 1e-3);
}

TEST_CASE("limit relations") {
  Grid g;
  const RelationReport xi = check(RelationId::LimitXi, g, 1e-9);
  const RelationReport poly = check(RelationId::LimitPoly, g, 1e-9);
  CHECK(xi.passed);
  CHECK(poly.passed);
  CHECK(xi.points.size() == 3 * 2 * 5 * 5);
  for (const PointResult& p : poly.points)
    if (p.point.n == 0 || p.point.x == 0) CHECK(p.lhs == 0.0);

  CHECK(monotonicity_residual({1e-2, 1e-3, 1e-4}) == 0.0);
  CHECK(monotonicity_residual({0.0, 0.0, 0.0}) == 0.0);
  CHECK(monotonicity_residual({1e-3, 2e-3, 1e-4}) == Approx(2.0));
}

TEST_CASE("reports are deterministic") {
  const RelationReport a = check(RelationId::GenfunDegree, small_grid(), 1e-9);
  const RelationReport b = check(RelationId::GenfunDegree, small_grid(), 1e-9);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].lhs == b.points[i].lhs);
    CHECK(a.points[i].rhs == b.points[i].rhs);
  }
}
