#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "trime/error.hpp"
#include "trime/point_manager.hpp"
#include "trime/point_treatment.hpp"

using namespace trime;

namespace {

struct Setup {
  Shape shape;
  GeometryGrid grid;
};

Setup prepared(Shape s, long long n) {
  GeometryGrid g(s, {0, 1, 0, 1}, n, 3.3, 5);
  g.select_boundary_cells(0.5);
  const auto rho = normalize_density(g, std::vector<double>(g.cell_count(), 1.0));
  g.compute_adaptive(rho, n, {});
  g.build_adf(s, 0.1, n, n, 10);
  return {std::move(s), std::move(g)};
}

}  // namespace

TEST_CASE("sphere tracing to a circle") {
  const Shape s = Shape::circle({0.5, 0.5}, 0.1);
  Vec2 q = sphere_trace({0.5, 0.5}, {1.0, 0.5}, s, 1e-9);
  CHECK(q.x == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(q.y == doctest::Approx(0.5));
  q = sphere_trace({0.45, 0.5}, {0.45, 0.9}, s, 1e-9);
  CHECK(std::abs(s.sdf(q)) <= 1e-9);
  CHECK(q.x == doctest::Approx(0.45));
  CHECK(q.y > 0.5);
  // The segment stops short of the boundary.
  try {
    sphere_trace({0.5, 0.5}, {0.55, 0.5}, s, 1e-9);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
  }
  // Too few steps.
  try {
    sphere_trace({0.5, 0.5}, {1.0, 0.5}, s, 1e-15, 0);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
  }
}

TEST_CASE("newton projection finds the radial point on a circle") {
  const Shape s = Shape::circle({0.5, 0.5}, 0.1);
  const double deps = std::sqrt(std::numeric_limits<double>::epsilon()) * 0.01;
  for (const Vec2 p : {Vec2{0.65, 0.52}, Vec2{0.41, 0.43}, Vec2{0.5, 0.38}}) {
    const Vec2 q = newton_project(p, s, 1e-10, deps);
    const Vec2 d = p - Vec2{0.5, 0.5};
    const Vec2 want = Vec2{0.5, 0.5} + d * (0.1 / norm(d));
    CHECK(dist(q, want) < 1e-7);
  }
}

TEST_CASE("newton projection onto an ellipse matches dense sampling") {
  // Implicit ellipse with a non-distance level function.
  const Shape s = Shape::function([](Vec2 p) {
    const double x = (p.x - 0.5) / 0.3, y = (p.y - 0.5) / 0.15;
    return 0.15 * (std::sqrt(x * x + y * y) - 1);
  });
  const double deps = std::sqrt(std::numeric_limits<double>::epsilon()) * 0.01;
  const double pi = std::acos(-1.0);
  for (const Vec2 p : {Vec2{0.85, 0.55}, Vec2{0.5, 0.68}, Vec2{0.3, 0.4}, Vec2{0.7, 0.6}}) {
    Vec2 q;
    REQUIRE(try_newton_project(p, s, 1e-10, deps, {}, q));
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200000; ++k) {
      const double t = 2 * pi * k / 200000;
      best = std::min(best, dist(p, {0.5 + 0.3 * std::cos(t), 0.5 + 0.15 * std::sin(t)}));
    }
    CHECK(dist(p, q) == doctest::Approx(best).epsilon(1e-4));
  }
}

TEST_CASE("newton projection damping and failure") {
  const Shape s = Shape::circle({0.5, 0.5}, 0.1);
  const double deps = 1e-9;
  ProjectionParams slow;
  slow.damping = 0.5;
  slow.newton_steps = 60;
  const Vec2 q = newton_project({0.7, 0.5}, s, 1e-10, deps, slow);
  CHECK(q.x == doctest::Approx(0.6).epsilon(1e-8));
  ProjectionParams none;
  none.newton_steps = 0;
  try {
    newton_project({0.7, 0.5}, s, 1e-10, deps, none);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NewtonDiverged);
  }
}

TEST_CASE("treatment clamps long moves") {
  Setup st = prepared(Shape::circle({0.5, 0.5}, 0.3), 4000);
  const Vec2 p{0.5, 0.5};
  const double lim = st.grid.t_pt(st.grid.cell_of(p));
  const Treated t = treat_new_position(p, PointCategory::Inner, {0.5 + 10 * lim, 0.5}, st.grid,
                                       st.shape);
  CHECK(t.p.x == doctest::Approx(0.5 + lim));
  CHECK(t.category == PointCategory::Inner);
  const Treated u =
      treat_new_position(p, PointCategory::Inner, {0.5, 0.5 + 0.5 * lim}, st.grid, st.shape);
  CHECK(u.p.y == 0.5 + 0.5 * lim);
}

TEST_CASE("treatment brings escaping points back to the boundary") {
  Setup st = prepared(Shape::circle({0.5, 0.5}, 0.3), 4000);
  const double lim = st.grid.t_pt(st.grid.cell_of({0.8, 0.5}));
  const Vec2 p{0.8 - 0.3 * lim, 0.5};
  const int c = st.grid.cell_of(p);
  REQUIRE(st.grid.category(c) == CellCategory::Boundary);
  const Treated t =
      treat_new_position(p, PointCategory::Inner, {p.x + 0.8 * lim, 0.5}, st.grid, st.shape);
  CHECK(t.category == PointCategory::Boundary);
  CHECK(std::abs(st.shape.sdf(t.p)) <= st.grid.geps(c) * 1.5);
  CHECK(t.p.y == doctest::Approx(0.5));

  // A boundary point pushed outward is projected back radially from the
  // clamped target.
  const Vec2 b{0.8, 0.5};
  const Vec2 target{0.8 + 0.5 * lim, 0.5 + 0.5 * lim};
  const Treated v = treat_new_position(b, PointCategory::Boundary, target, st.grid, st.shape);
  CHECK(v.category == PointCategory::Boundary);
  CHECK(std::abs(st.shape.sdf(v.p)) <= st.grid.geps(c) * 1.5);
  const Vec2 d = target - Vec2{0.5, 0.5};
  CHECK(dist(v.p, Vec2{0.5, 0.5} + d * (0.3 / norm(d))) < 1e-6);
}

TEST_CASE("treatment keeps random moves inside and is idempotent") {
  Setup st = prepared(Shape::combine(BooleanOp::Difference, Shape::circle({0.5, 0.5}, 0.4),
                                     Shape::circle({0.6, 0.5}, 0.12)),
                      6000);
  const auto pts = oracle::random_points(4000, 7, {0, 1, 0, 1});
  const auto steps = oracle::random_points(4000, 8, {-0.02, 0.02, -0.02, 0.02});
  int checked = 0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Vec2 p = pts[k];
    const int c = st.grid.cell_of(p);
    if (st.grid.category(c) == CellCategory::Outer) continue;
    if (st.grid.category(c) == CellCategory::Boundary && st.grid.adf_in_cell(c, p) > st.grid.geps(c)) {
      continue;
    }
    const PointCategory cat = categorize(p, st.grid);
    const Treated t = treat_new_position(p, cat, p + steps[k], st.grid, st.shape);
    const int tc = st.grid.cell_of(t.p);
    REQUIRE(tc >= 0);
    CHECK(st.grid.category(tc) != CellCategory::Outer);
    if (st.grid.category(tc) == CellCategory::Boundary) {
      CHECK(st.grid.adf_in_cell(tc, t.p) <= st.grid.geps(tc) * (1 + 1e-12) + 1e-15);
    }
    CHECK(t.category == categorize(t.p, st.grid));
    if (cat == PointCategory::Inner) CHECK(dist(t.p, p) <= st.grid.t_pt(c) * (1 + 1e-12));
    // Treating the result again without a move leaves it alone.
    const Treated again = treat_new_position(t.p, t.category, t.p, st.grid, st.shape);
    CHECK(again.p.x == t.p.x);
    CHECK(again.p.y == t.p.y);
    CHECK(again.category == t.category);
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("treatment leaves points outside the domain alone") {
  Setup st = prepared(Shape::circle({0.5, 0.5}, 0.3), 4000);
  const Treated t = treat_new_position({-0.1, 0.5}, PointCategory::Inner, {0.5, 0.5}, st.grid, st.shape);
  CHECK(t.p.x == -0.1);
}
