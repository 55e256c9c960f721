#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "trime/error.hpp"
#include "trime/shape.hpp"

using namespace trime;

namespace {

Contour make_contour(const std::vector<oracle::Seg>& segs, Box domain) {
  std::vector<Segment> s;
  for (const auto& g : segs) s.push_back(Segment::from_points(g.a, g.b));
  return Contour(std::move(s), domain);
}

std::vector<oracle::Seg> unit_square_cw() {
  return oracle::clockwise_loop({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

}  // namespace

TEST_CASE("circle sdf examples") {
  const Vec2 c{0.5, 0.5};
  CHECK(circle_sdf(c, 0.1, {0.5, 0.5}) == doctest::Approx(-0.1));
  CHECK(circle_sdf(c, 0.1, {0.6, 0.5}) == doctest::Approx(0.0));
  CHECK(circle_sdf(c, 0.1, {0.9, 0.5}) == doctest::Approx(0.3));
}

TEST_CASE("rectangle sdf is the exact signed distance") {
  const Box r{0, 2, 0, 1};
  const auto loop = oracle::clockwise_loop({{0, 0}, {2, 0}, {2, 1}, {0, 1}});
  for (const Vec2 p : oracle::random_points(2000, 3, {-1, 3, -1, 2})) {
    CHECK(rectangle_sdf(r, p) == doctest::Approx(oracle::polygon_sdf(p, loop)).epsilon(1e-12));
  }
  CHECK(rectangle_sdf(r, {3, 2}) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("boolean sdf algebra") {
  CHECK(boolean_sdf(BooleanOp::Union, 0.3, 0.3) == 0.3);
  CHECK(boolean_sdf(BooleanOp::Difference, -0.05, -0.02) == doctest::Approx(0.02));
  CHECK(boolean_sdf(BooleanOp::Intersection, -0.2, 0.1) == doctest::Approx(0.1));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng), b = u(rng);
    CHECK(boolean_sdf(BooleanOp::Union, a, b) == boolean_sdf(BooleanOp::Union, b, a));
    CHECK(boolean_sdf(BooleanOp::Intersection, a, b) ==
          boolean_sdf(BooleanOp::Intersection, b, a));
    CHECK(boolean_sdf(BooleanOp::Difference, a, b) ==
          boolean_sdf(BooleanOp::Intersection, a, -b));
  }
}

TEST_CASE("closest point on a segment") {
  const Segment s = Segment::from_points({0, 0}, {1, 0});
  auto h = closest_on_segment({0, 1}, s);
  CHECK(h.q.x == 0.0);
  CHECK(h.q.y == 0.0);
  CHECK(h.dist == doctest::Approx(1));
  h = closest_on_segment({0.5, 0.5}, s);
  CHECK(h.q.x == doctest::Approx(0.5));
  CHECK(h.q.y == doctest::Approx(0.0));
  CHECK(h.dist == doctest::Approx(0.5));
  h = closest_on_segment({2, 0}, s);
  CHECK(h.q.x == doctest::Approx(1));
  CHECK(h.dist == doctest::Approx(1));
}

TEST_CASE("segment inward normal for a clockwise loop") {
  const Contour c = make_contour(unit_square_cw(), {-1, 2, -1, 2});
  for (const Segment& s : c.segments()) {
    CHECK(norm(s.inward_normal) == doctest::Approx(1).epsilon(1e-12));
    const Vec2 probe = midpoint(s.p1, s.p2) + s.inward_normal * 1e-3;
    CHECK(probe.x > 0);
    CHECK(probe.x < 1);
    CHECK(probe.y > 0);
    CHECK(probe.y < 1);
  }
}

TEST_CASE("contour query on the unit square") {
  const Contour c = make_contour(unit_square_cw(), {-1, 2, -1, 2});
  auto h = c.query({0.5, 0.5});
  CHECK(h.sdf == doctest::Approx(-0.5));
  h = c.query({0.5, -0.25});
  CHECK(h.sdf == doctest::Approx(0.25));
  CHECK(h.q.x == doctest::Approx(0.5));
  CHECK(h.q.y == doctest::Approx(0.0));
  // Diagonal outside a corner: the averaged normal keeps the sign right.
  h = c.query({1.2, 1.2});
  CHECK(h.sdf == doctest::Approx(std::sqrt(0.08)));
}

TEST_CASE("grid accelerated contour query equals the all-segment search") {
  const auto loop = oracle::clockwise_loop(oracle::regular_polygon({0.5, 0.5}, 0.3, 64));
  const Contour c = make_contour(loop, {0, 1, 0, 1});
  for (const Vec2 p : oracle::random_points(200, 11, {0, 1, 0, 1})) {
    CHECK(std::abs(c.query(p).sdf - oracle::polygon_sdf(p, loop)) <= 1e-12);
  }
}

TEST_CASE("contour query property over random star polygons") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  const double pi = std::acos(-1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(u(rng) * 497);
    std::vector<Vec2> v;
    for (int k = 0; k < n; ++k) {
      const double a = 2 * pi * k / n;
      const double r = 0.15 + 0.3 * u(rng);
      v.push_back({0.5 + r * std::cos(a), 0.5 + r * std::sin(a)});
    }
    const auto loop = oracle::clockwise_loop(v);
    const Contour c = make_contour(loop, {0, 1, 0, 1});
    for (const Vec2 p : oracle::random_points(100, 100 + trial, {0, 1, 0, 1})) {
      const double want = oracle::polygon_sdf(p, loop);
      const double got = c.query(p).sdf;
      CHECK(std::abs(std::abs(got) - std::abs(want)) <= 1e-12);
      // Sign can only be ambiguous essentially on the boundary.
      if (std::abs(want) > 1e-9) CHECK((got < 0) == (want < 0));
    }
  }
}

TEST_CASE("contour validation") {
  CHECK_THROWS_AS(Contour({}, {0, 1, 0, 1}), Error);
  try {
    Contour({}, {0, 1, 0, 1});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyContour);
  }
  // Open chain.
  std::vector<Segment> open = {Segment::from_points({0, 0}, {0, 1}),
                               Segment::from_points({0, 1}, {1, 1})};
  try {
    Contour(open, {0, 1, 0, 1});
    FAIL("open contour accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidContour);
  }
  // Counterclockwise loop.
  std::vector<Segment> ccw;
  const std::vector<Vec2> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int k = 0; k < 4; ++k) ccw.push_back(Segment::from_points(v[k], v[(k + 1) % 4]));
  try {
    Contour(ccw, {0, 1, 0, 1});
    FAIL("counterclockwise contour accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidContour);
  }
}

TEST_CASE("contour file with two loops") {
  const auto path = std::filesystem::temp_directory_path() / "trime_two_loops.txt";
  {
    std::ofstream out(path);
    out << "# outer square then a second square\n";
    for (const auto& s : oracle::clockwise_loop({{0.1, 0.1}, {0.4, 0.1}, {0.4, 0.4}, {0.1, 0.4}})) {
      out << s.a.x << ' ' << s.a.y << ' ' << s.b.x << ' ' << s.b.y << '\n';
    }
    for (const auto& s : oracle::clockwise_loop({{0.6, 0.6}, {0.9, 0.6}, {0.9, 0.9}, {0.6, 0.9}})) {
      out << s.a.x << ' ' << s.a.y << ' ' << s.b.x << ' ' << s.b.y << '\n';
    }
  }
  const Contour c = Contour::from_file(path, {0, 1, 0, 1});
  CHECK(c.segments().size() == 8);
  CHECK(c.query({0.25, 0.25}).sdf == doctest::Approx(-0.15));
  CHECK(c.query({0.75, 0.75}).sdf == doctest::Approx(-0.15));
  CHECK(c.query({0.5, 0.5}).sdf == doctest::Approx(std::sqrt(0.02)));
  std::filesystem::remove(path);
}

TEST_CASE("sdf gradient") {
  const Shape circ = Shape::circle({0.5, 0.5}, 0.1);
  Vec2 g = circ.gradient({0.9, 0.5}, 1e-6);
  CHECK(g.x == doctest::Approx(1).epsilon(1e-6));
  CHECK(std::abs(g.y) < 1e-6);
  const Shape lin = Shape::function([](Vec2 p) { return p.x; });
  g = lin.gradient({0.3, 0.7}, 1e-6);
  CHECK(g.x == doctest::Approx(1).epsilon(1e-9));
  CHECK(std::abs(g.y) < 1e-9);
  const Shape sq = Shape::contour(make_contour(unit_square_cw(), {-1, 2, -1, 2}));
  g = sq.gradient({0.5, 1.3}, 1e-6);
  CHECK(std::abs(g.x) < 1e-6);
  CHECK(g.y == doctest::Approx(1).epsilon(1e-6));
  // Unit length wherever the closest point is unique and inside a segment.
  const auto loop = oracle::clockwise_loop(oracle::regular_polygon({0.5, 0.5}, 0.3, 64));
  const Shape poly = Shape::contour(make_contour(loop, {0, 1, 0, 1}));
  for (const Vec2 p : oracle::random_points(500, 21, {0, 1, 0, 1})) {
    const ContourHit h = poly.as_contour()->query(p);
    if (std::abs(h.sdf) < 0.01 || dist(p, {0.5, 0.5}) < 0.05) continue;
    const Segment& s = poly.as_contour()->segments()[h.segment];
    if (dist(h.q, s.p1) < 1e-4 || dist(h.q, s.p2) < 1e-4) continue;
    CHECK(norm(poly.gradient(p, 1e-6)) == doctest::Approx(1).epsilon(1e-3));
  }
}

TEST_CASE("sampled boundary distance matches sdf") {
  // The two boundaries never meet, so the min/max composite is exact here.
  const Shape shape = Shape::combine(BooleanOp::Difference, Shape::rectangle({0.1, 0.9, 0.1, 0.9}),
                                     Shape::circle({0.5, 0.5}, 0.2));
  std::vector<Vec2> samples;
  const int n = 4000;
  for (int k = 0; k < n; ++k) {
    const double t = 0.1 + 0.8 * k / n;
    samples.push_back({t, 0.1});
    samples.push_back({t, 0.9});
    samples.push_back({0.1, t});
    samples.push_back({0.9, t});
  }
  for (const Vec2& p : oracle::regular_polygon({0.5, 0.5}, 0.2, 4 * n)) samples.push_back(p);
  const double spacing = 0.8 / n;
  for (const Vec2 p : oracle::random_points(10000, 4, {0, 1, 0, 1})) {
    const double d = shape.sdf(p);
    double best = 1e9;
    for (const Vec2& s : samples) best = std::min(best, dist(p, s));
    CHECK(std::abs(std::abs(d) - best) <= spacing);
  }
}
