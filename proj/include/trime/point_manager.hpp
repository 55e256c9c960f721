#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trime/geometry_grid.hpp"
#include "trime/parallel.hpp"
#include "trime/point_treatment.hpp"
#include "trime/shape.hpp"
#include "trime/voronoi.hpp"

namespace trime {

struct QualityRecord {
  double half_alpha = 0;
  double half_beta = 0;
  double max_alpha = 0;
  std::size_t triangles = 0;
};

struct MeshState {
  std::vector<Vec2> points;
  std::vector<PointCategory> category;
  std::vector<double> prev_move;  // distance moved in the last iteration
  std::vector<Vec2> snapshot;     // positions at the last triangulation
  std::vector<char> frozen;
  std::vector<Tri> triangles;     // valid triangles only
  long long n_total = 0;
  long long n_current = 0;
  long long n_init = 0;
  std::vector<QualityRecord> history;

  std::size_t size() const { return points.size(); }
  void add_point(Vec2 p, PointCategory c, bool fixed = false);
};

// (mean of square roots)^2. Throws EmptyList on empty input.
double half_mean(std::span<const double> values);

struct TriangleQuality {
  double alpha = 0;
  double beta = 0;
  double r_circum = 0;
  double r_in = 0;
  double l_max = 0;
  double l_min = 0;
  Vec2 circumcenter;
  Vec2 centroid;
};

// Throws DegenerateTriangle for zero area.
TriangleQuality triangle_quality(Vec2 a, Vec2 b, Vec2 c);

// Half-means and the max aspect ratio over the triangles. Degenerate
// triangles count as infinitely bad.
QualityRecord quality_stats(std::span<const Vec2> points, std::span<const Tri> tris,
                            const Parallel& par = {});

// |cur - prev| / prev.
double relative_change(double prev, double cur);

// Normalized density over the seeding cells (inner and selected boundary);
// every other cell is scaled by the same factor.
std::vector<double> normalize_density(const GeometryGrid& grid, std::span<const double> rho);

// Per-cell point counts by error diffusion over the seeding cells, rows from
// the top down and left to right, then repaired to sum to exactly n.
std::vector<int> dither_counts(const GeometryGrid& grid, std::span<const double> rho_norm,
                               long long n);

PointCategory categorize(Vec2 p, const GeometryGrid& grid);

// Fills state with n random points distributed by the dithered counts.
// Seeding-cell points outside the shape are projected back onto it.
void init_points(MeshState& state, const GeometryGrid& grid, const Shape& shape,
                 std::span<const double> rho_norm, long long n, std::uint64_t seed,
                 const ProjectionParams& proj = {});

struct AdditionParams {
  double t_add_quality = 0.002;
  double fac_add = 0.6;
};

// Inserts points at the centroids of the triangles with the largest
// circumradius to local edge length ratio once the quality has levelled off.
// Returns the number of points added.
long long maybe_add_points(MeshState& state, GeometryGrid& grid, const AdditionParams& params);

}  // namespace trime
