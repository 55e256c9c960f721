#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "trime/geometry_grid.hpp"
#include "trime/parallel.hpp"
#include "trime/shape.hpp"
#include "trime/vec2.hpp"

namespace trime {

// Uniform bins over the domain box, stored in CSR form. Points are expected
// to lie inside the box; anything outside is clamped into an edge bin.
class PointBins {
 public:
  PointBins() = default;
  // Bin counts follow ceil(lambda * L) with lambda = sqrt(N / (per_bin * A)).
  PointBins(std::span<const Vec2> points, const Box& box, double per_bin);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  const Box& box() const { return box_; }
  int column_of(double x) const;
  int row_of(double y) const;
  std::span<const std::uint32_t> bin(int i, int j) const {
    const std::size_t c = static_cast<std::size_t>(j) * nx_ + i;
    return {items_.data() + offsets_[c], items_.data() + offsets_[c + 1]};
  }

 private:
  int nx_ = 0;
  int ny_ = 0;
  double dx_ = 0;
  double dy_ = 0;
  Box box_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> items_;
};

// Edge labels that are not point indices.
inline constexpr std::int32_t kWallBottom = -1;
inline constexpr std::int32_t kWallRight = -2;
inline constexpr std::int32_t kWallTop = -3;
inline constexpr std::int32_t kWallLeft = -4;
inline constexpr std::int32_t kOctagonEdge = -5;

struct VoronoiCell {
  std::vector<Vec2> vertices;         // counterclockwise
  std::vector<std::int32_t> labels;   // labels[k] names edge vertices[k] -> vertices[k+1]
  double area = 0;
};

inline constexpr double kUnboundedSpan = std::numeric_limits<double>::infinity();

// The regular octagon of circumradius `span` around p (flat top, vertices at
// 22.5 + 45k degrees) intersected with the box. An infinite span gives the box.
VoronoiCell initial_cell(Vec2 p, double span, const Box& box);

// Clips `cell` (vertices relative to the generator) by the bisector with a
// neighbour at relative offset u. Returns true if anything was cut away.
bool clip_cell(std::vector<Vec2>& local, std::vector<std::int32_t>& labels, Vec2 u,
               std::int32_t label);

VoronoiCell compute_bounded_cell(std::size_t i, std::span<const Vec2> points,
                                 const PointBins& bins, double span);

// spans[i] is the octagon circumradius for point i.
std::vector<VoronoiCell> compute_diagram(std::span<const Vec2> points, const PointBins& bins,
                                         std::span<const double> spans, const Parallel& par = {});

using Tri = std::array<std::uint32_t, 3>;

// Dual triangulation from mutual neighbour records, counterclockwise. Faces
// with more than three generators are fanned from their smallest index.
std::vector<Tri> extract_delaunay(std::span<const VoronoiCell> cells, const Parallel& par = {});

struct ValidityParams {
  double t_tria_ccircum = 0.4;
};

// Centroid, edge-midpoint and circumcenter tests against the shape.
bool triangle_valid(Vec2 a, Vec2 b, Vec2 c, const GeometryGrid& grid, const Shape& shape,
                    const ValidityParams& params);

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c);

}  // namespace trime
