#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "trime/error.hpp"
#include "trime/geometry_grid.hpp"
#include "trime/point_manager.hpp"

using namespace trime;

namespace {

GeometryGrid circle_grid(long long n = 5000) {
  return GeometryGrid(Shape::circle({0.5, 0.5}, 0.1), {0, 1, 0, 1}, n, 3.3, 5);
}

void ready(GeometryGrid& g, const Shape& s, long long n_cur, long long n_total) {
  g.select_boundary_cells(0.5);
  const std::vector<double> rho = normalize_density(g, std::vector<double>(g.cell_count(), 1.0));
  g.compute_adaptive(rho, n_cur, {});
  g.build_adf(s, 0.1, n_cur, n_total, 10);
}

struct Leaf {
  Box box;
  int depth;
  const AdfCell::Node* node;
};

void leaves(const AdfCell& a, std::vector<Leaf>& out) {
  std::function<void(int, Box, int)> walk = [&](int idx, Box b, int depth) {
    const auto& n = a.nodes()[idx];
    if (n.first_child < 0) {
      out.push_back({b, depth, &n});
      return;
    }
    const double mx = 0.5 * (b.x0 + b.x1), my = 0.5 * (b.y0 + b.y1);
    walk(n.first_child + 0, {b.x0, mx, b.y0, my}, depth + 1);
    walk(n.first_child + 1, {mx, b.x1, b.y0, my}, depth + 1);
    walk(n.first_child + 2, {b.x0, mx, my, b.y1}, depth + 1);
    walk(n.first_child + 3, {mx, b.x1, my, b.y1}, depth + 1);
  };
  walk(0, a.box(), 0);
}

double bilinear(const AdfCell::Node& n, const Box& b, Vec2 p) {
  const double u = (p.x - b.x0) / b.width(), v = (p.y - b.y0) / b.height();
  return (1 - u) * (1 - v) * n.v[0] + u * (1 - v) * n.v[1] + (1 - u) * v * n.v[2] + u * v * n.v[3];
}

}  // namespace

TEST_CASE("grid dimensions reproduce 195 x 195 for 5000 points") {
  const auto [nx, ny] = GeometryGrid::dimensions({0, 1, 0, 1}, 5000, 3.3, 5);
  CHECK(nx == 195);
  CHECK(ny == 195);
  const GeometryGrid g = circle_grid();
  CHECK(g.nx() == 195);
  CHECK(g.ny() == 195);
}

TEST_CASE("grid refinement is monotone in n_total") {
  int last = 0;
  for (long long n = 10; n < 200000; n = n * 3 / 2 + 1) {
    const int nx = GeometryGrid::dimensions({0, 2, 0, 1}, n, 3.3, 5).first;
    CHECK(nx >= last);
    last = nx;
  }
}

TEST_CASE("degenerate domain") {
  try {
    GeometryGrid(Shape::circle({0, 0}, 1), {1, 1, 0, 1}, 100, 3.3, 5);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateDomain);
  }
}

TEST_CASE("cell categories match a midpoint re-evaluation") {
  const Shape s = Shape::circle({0.5, 0.5}, 0.1);
  const GeometryGrid g = circle_grid();
  const double diag = std::hypot(g.dx(), g.dy());
  int counts[3] = {0, 0, 0};
  for (int c = 0; c < g.cell_count(); ++c) {
    const Vec2 m{(g.column(c) + 0.5) * (1.0 / g.nx()), (g.row(c) + 0.5) * (1.0 / g.ny())};
    const double d = std::hypot(m.x - 0.5, m.y - 0.5) - 0.1;
    const CellCategory want = std::abs(d) <= diag ? CellCategory::Boundary
                              : d < 0             ? CellCategory::Inner
                                                  : CellCategory::Outer;
    CHECK(g.category(c) == want);
    ++counts[static_cast<int>(g.category(c))];
  }
  CHECK(counts[0] + counts[1] + counts[2] == g.cell_count());
  CHECK(counts[0] > 0);
  CHECK(counts[1] > 0);
  CHECK(counts[2] > 0);
  (void)s;
}

TEST_CASE("domain inside a huge circle has no outer cells") {
  const GeometryGrid g(Shape::circle({0.5, 0.5}, 10), {0, 1, 0, 1}, 2000, 3.3, 5);
  for (int c = 0; c < g.cell_count(); ++c) CHECK(g.category(c) == CellCategory::Inner);
  const GeometryGrid h(Shape::circle({0.5, 0.5}, 0.72), {0, 1, 0, 1}, 2000, 3.3, 5);
  const double diag = std::hypot(h.dx(), h.dy());
  for (int c = 0; c < h.cell_count(); ++c) {
    CHECK(h.category(c) != CellCategory::Outer);
    if (h.category(c) == CellCategory::Boundary) CHECK(std::abs(h.midpoint_sdf(c)) <= diag);
  }
}

TEST_CASE("adaptive quantities") {
  // 100 x 100 cells of width 0.01; four expected points per cell.
  GeometryGrid g(Shape::circle({0.5, 0.5}, 10), {0, 1, 0, 1}, 10000, 1.0, 1);
  REQUIRE(g.nx() == 100);
  g.select_boundary_cells(0.5);
  const std::vector<double> rho(g.cell_count(), 1.0 / g.cell_count());
  g.compute_adaptive(rho, 40000, {});
  CHECK(g.h(0) == doctest::Approx(0.005));
  CHECK(g.h_avg() == doctest::Approx(0.005));
  CHECK(g.geps(0) == doctest::Approx(5e-5));
  CHECK(g.deps(0) == doctest::Approx(std::sqrt(std::numeric_limits<double>::epsilon()) * 0.005));
  CHECK(g.t_retria(7) == doctest::Approx(0.1 * 0.005));
  CHECK(g.t_end(7) == doctest::Approx(0.001 * 0.005));
  CHECK(g.t_pt(7) == doctest::Approx(0.4 * 0.005));
}

TEST_CASE("uniform density gives sqrt(area / N)") {
  const Shape s = Shape::circle({0.5, 0.5}, 0.3);
  GeometryGrid g(s, {0, 1, 0, 1}, 3000, 3.3, 5);
  g.select_boundary_cells(0.5);
  const auto rho = normalize_density(g, std::vector<double>(g.cell_count(), 1.0));
  g.compute_adaptive(rho, 3000, {});
  int seeding = 0;
  for (int c = 0; c < g.cell_count(); ++c) seeding += g.seeding_cell(c);
  const double want = std::sqrt(seeding * g.dx() * g.dy() / 3000);
  for (int c = 0; c < g.cell_count(); ++c) {
    if (g.category(c) != CellCategory::Outer) CHECK(g.h(c) == doctest::Approx(want));
  }
}

TEST_CASE("zero density on an inner cell") {
  GeometryGrid g(Shape::circle({0.5, 0.5}, 10), {0, 1, 0, 1}, 100, 3.3, 5);
  g.select_boundary_cells(0.5);
  std::vector<double> rho(g.cell_count(), 1.0 / g.cell_count());
  rho[3] = 0;
  try {
    g.compute_adaptive(rho, 100, {});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroDensityCell);
  }
}

TEST_CASE("rescale on addition") {
  const Shape s = Shape::circle({0.5, 0.5}, 0.3);
  GeometryGrid g(s, {0, 1, 0, 1}, 5000, 3.3, 5);
  ready(g, s, 1000, 5000);
  const int c = g.cell_of({0.5, 0.5});
  const double h0 = g.h(c), ge0 = g.geps(c), de0 = g.deps(c), ha0 = g.h_avg();
  g.rescale(1000, 1000);
  CHECK(g.h(c) == h0);
  g.rescale(1000, 1600);
  CHECK(g.h(c) / h0 == doctest::Approx(0.790569415042).epsilon(1e-10));
  CHECK(g.geps(c) / ge0 == doctest::Approx(std::sqrt(1000.0 / 1600)));
  CHECK(g.deps(c) / de0 == doctest::Approx(std::sqrt(1000.0 / 1600)));
  CHECK(g.h_avg() / ha0 == doctest::Approx(std::sqrt(1000.0 / 1600)));
  CHECK(g.t_pt(c) / g.h(c) == doctest::Approx(0.4));
  g.rescale(1600, 2560);
  CHECK(g.h(c) / h0 == doctest::Approx(std::sqrt(1000.0 / 2560)));
}

TEST_CASE("ADF of a bilinear field does not subdivide") {
  const Shape plane = Shape::function([](Vec2 p) { return p.x - 0.5; });
  const AdfCell a(plane, {0.4, 0.6, 0.4, 0.6}, 1e-12, 10);
  CHECK(a.depth() == 0);
  CHECK(a.nodes().size() == 1);
  CHECK(a.query({0.4, 0.4}) == doctest::Approx(-0.1));
  CHECK(a.query({0.5, 0.5}) == doctest::Approx(0.0));
  CHECK(a.query({0.537, 0.41}) == doctest::Approx(0.037));
}

TEST_CASE("ADF with a vanishing tolerance reaches the depth cap") {
  const Shape s = Shape::circle({0.5, 0.5}, 0.1);
  const AdfCell a(s, {0.59, 0.61, 0.49, 0.51}, 0.0, 10);
  CHECK(a.depth() == 10);
}

TEST_CASE("ADF structure and error bound") {
  const Shape s = Shape::circle({0.5, 0.5}, 0.1);
  GeometryGrid g = circle_grid();
  ready(g, s, 1000, 5000);
  REQUIRE(g.has_adf());
  for (int c : g.boundary_cells()) {
    const AdfCell& a = g.adf_cell(c);
    std::vector<Leaf> ls;
    leaves(a, ls);
    double area = 0;
    for (const Leaf& l : ls) {
      area += l.box.area();
      // Corners are exact.
      CHECK(l.node->v[0] == s.sdf({l.box.x0, l.box.y0}));
      CHECK(l.node->v[3] == s.sdf({l.box.x1, l.box.y1}));
      CHECK(a.query({l.box.x1, l.box.y1}) == doctest::Approx(l.node->v[3]).epsilon(1e-12));
      if (l.depth < 10) {
        const double mx = 0.5 * (l.box.x0 + l.box.x1), my = 0.5 * (l.box.y0 + l.box.y1);
        for (const Vec2 p : {Vec2{mx, l.box.y0}, Vec2{mx, l.box.y1}, Vec2{l.box.x0, my},
                             Vec2{l.box.x1, my}, Vec2{mx, my}}) {
          CHECK(std::abs(bilinear(*l.node, l.box, p) - s.sdf(p)) <= a.tolerance());
        }
      }
    }
    CHECK(area == doctest::Approx(a.box().area()).epsilon(1e-12));
    // Siblings share corners bit for bit.
    for (const auto& n : a.nodes()) {
      if (n.first_child < 0) continue;
      const auto* ch = &a.nodes()[n.first_child];
      CHECK(ch[0].v[1] == ch[1].v[0]);
      CHECK(ch[0].v[2] == ch[2].v[0]);
      CHECK(ch[0].v[3] == ch[3].v[0]);
      CHECK(ch[1].v[3] == ch[3].v[1]);
      CHECK(ch[2].v[3] == ch[3].v[2]);
      CHECK(ch[0].v[0] == n.v[0]);
      CHECK(ch[3].v[3] == n.v[3]);
    }
  }
}

TEST_CASE("ADF tolerance formula and random queries") {
  const Shape s = Shape::circle({0.5, 0.5}, 0.1);
  GeometryGrid g = circle_grid();
  ready(g, s, 1000, 5000);
  const int c0 = g.boundary_cells().front();
  CHECK(g.adf_cell(c0).tolerance() ==
        doctest::Approx(0.1 * g.geps(c0) * std::sqrt(1000.0 / 5000)));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  const auto& bc = g.boundary_cells();
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const int c = bc[static_cast<std::size_t>(u(rng) * bc.size())];
    const Box b = g.cell_box(c);
    const Vec2 p{b.x0 + u(rng) * b.width(), b.y0 + u(rng) * b.height()};
    const AdfCell& a = g.adf_cell(c);
    if (a.leaf_depth(p) >= 10) continue;
    CHECK(std::abs(g.adf(p) - s.sdf(p)) <= a.tolerance());
    ++checked;
  }
  CHECK(checked > 900);
}

TEST_CASE("ADF query outside a boundary cell") {
  const Shape s = Shape::circle({0.5, 0.5}, 0.1);
  GeometryGrid g = circle_grid();
  ready(g, s, 1000, 5000);
  try {
    g.adf({0.5, 0.5});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotBoundaryCell);
  }
}
