#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "trime/vec2.hpp"

namespace trime {

// One oriented boundary segment. Contours run clockwise, so the inward
// normal is the direction rotated clockwise by 90 degrees.
struct Segment {
  Vec2 p1;
  Vec2 p2;
  Vec2 inward_normal;

  static Segment from_points(Vec2 a, Vec2 b);
  double length() const { return dist(p1, p2); }
};

struct SegmentHit {
  Vec2 q;           // nearest point on the closed segment
  double dist = 0;  // |p - q|
  double t = 0;     // clamped parameter, 0 at p1 and 1 at p2
};

SegmentHit closest_on_segment(Vec2 p, const Segment& s);

// Uniform bins over the contour domain. Each bin lists every segment that
// touches it, in increasing segment index.
class SegmentGrid {
 public:
  SegmentGrid() = default;
  SegmentGrid(std::span<const Segment> segments, Box box);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  const Box& box() const { return box_; }

  std::span<const std::uint32_t> bin(int i, int j) const {
    const std::size_t c = static_cast<std::size_t>(j) * nx_ + i;
    return {items_.data() + offsets_[c], items_.data() + offsets_[c + 1]};
  }
  int column_of(double x) const;
  int row_of(double y) const;

 private:
  int nx_ = 0;
  int ny_ = 0;
  double dx_ = 0;
  double dy_ = 0;
  Box box_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> items_;
};

struct ContourHit {
  double sdf = 0;
  Vec2 q;
  Vec2 normal;  // inward normal at q (averaged at shared endpoints)
  std::uint32_t segment = 0;
};

// Closed clockwise polyline boundary with grid-accelerated closest-point
// queries.
class Contour {
 public:
  // Segments must form closed loops; endpoints are matched within 1e-12 of
  // the domain diagonal and snapped together.
  Contour(std::vector<Segment> segments, Box domain);

  // Reads the plain-text "x1 y1 x2 y2" per line format.
  static Contour from_file(const std::filesystem::path& path, Box domain);

  ContourHit query(Vec2 p) const;

  const std::vector<Segment>& segments() const { return segments_; }
  const SegmentGrid& grid() const { return grid_; }
  std::uint32_t previous(std::uint32_t s) const { return prev_[s]; }
  std::uint32_t next(std::uint32_t s) const { return next_[s]; }
  // Inward normal used for a hit on segment s with clamped parameter t.
  Vec2 normal_at(std::uint32_t s, double t) const;
  double mean_segment_length() const { return mean_length_; }

 private:
  std::vector<Segment> segments_;
  std::vector<std::uint32_t> prev_;
  std::vector<std::uint32_t> next_;
  double mean_length_ = 0;
  SegmentGrid grid_;
};

enum class BooleanOp { Union, Difference, Intersection };

double circle_sdf(Vec2 center, double radius, Vec2 p);
double rectangle_sdf(const Box& rect, Vec2 p);
double boolean_sdf(BooleanOp op, double a, double b);

// Evaluatable signed distance representation: negative inside, positive
// outside. Combined shapes give the usual min/max bound, which is exact only
// away from the places where both children matter.
class Shape {
 public:
  struct Circle {
    Vec2 center;
    double radius = 0;
  };
  struct Rectangle {
    Box bounds;
  };
  struct Combined {
    BooleanOp op = BooleanOp::Union;
    std::shared_ptr<const Shape> left;
    std::shared_ptr<const Shape> right;
  };
  struct UserFunction {
    std::function<double(Vec2)> fn;
  };
  using Variant =
      std::variant<Circle, Rectangle, std::shared_ptr<const Contour>, Combined, UserFunction>;

  static Shape circle(Vec2 center, double radius);
  static Shape rectangle(Box bounds);
  static Shape contour(Contour c);
  static Shape combine(BooleanOp op, Shape left, Shape right);
  static Shape function(std::function<double(Vec2)> fn);

  double sdf(Vec2 p) const;
  // Central differences with the given step in each axis.
  Vec2 gradient(Vec2 p, double step) const;

  const Variant& variant() const { return v_; }
  // Non-null only for a bare contour shape.
  const Contour* as_contour() const;
  // Every contour segment reachable in the expression tree.
  void collect_segments(std::vector<Segment>& out) const;

 private:
  explicit Shape(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

}  // namespace trime
