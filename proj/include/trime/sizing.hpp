#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trime/geometry_grid.hpp"
#include "trime/parallel.hpp"
#include "trime/point_treatment.hpp"
#include "trime/shape.hpp"

namespace trime {

struct SizingParams {
  double fac_s = 0.5;
  int n_grid = 5;
  int n_nei_thres = 3;
  double fac_nei = 2.0;
  double fac_geps = 0.01;
};

// Grid-resolution tolerances used before any adaptive quantity exists.
struct BoundaryTolerances {
  double d_s;       // target spacing
  double geps_hat;  // on-boundary tolerance
  double deps_hat;  // finite difference step
};
BoundaryTolerances boundary_tolerances(const GeometryGrid& grid, const SizingParams& p);

// Dense boundary samples: contour endpoints plus subdivision points, and for
// implicit parts random seeds in boundary cells projected onto the boundary.
// Throws ProjectionStarvation when fewer than three survive.
std::vector<Vec2> generate_boundary_points(const Shape& shape, const GeometryGrid& grid,
                                           const SizingParams& params, std::uint64_t seed,
                                           const Parallel& par = {});

// Merges each point with its nearest same-feature neighbour while they are
// closer than d_s. Same feature means the midpoint is within geps_hat of the
// boundary.
std::vector<Vec2> trim_boundary_points(std::vector<Vec2> pts, const Shape& shape, const Box& box,
                                       double d_s, double geps_hat);

// Farthest cell vertex v1 per point and the farthest vertex on the far side
// of the plane through the point normal to v1 - s, from unbounded cells.
std::vector<Vec2> medial_axis_points(std::span<const Vec2> s, const Box& box,
                                     const Parallel& par = {});

// Drops candidates outside the box or not strictly inside the shape.
std::vector<Vec2> interior_medial_points(std::span<const Vec2> m, const Shape& shape,
                                         const Box& box, double geps_hat);

// Keeps points with at least n_thres other points within r_nei.
std::vector<Vec2> trim_medial_points(std::span<const Vec2> m, double r_nei, int n_thres);

// Distance from every boundary sample to the nearest medial point.
std::vector<double> compute_lfs(std::span<const Vec2> s, std::span<const Vec2> m, double diagonal,
                                const Parallel& par = {});

// mu_i = min_s (K |s - m_i| + lfs(s)) on inner and boundary cells, and on
// outer cells too when include_outer is set. Undefined cells hold NaN.
std::vector<double> sizing_from_samples(const GeometryGrid& grid, std::span<const Vec2> s,
                                        std::span<const double> lfs, double k, bool include_outer,
                                        const Parallel& par = {});

// rho = 1 / mu^2, zero where mu is undefined.
std::vector<double> density_from_sizing(std::span<const double> mu);

struct SizingModel {
  std::vector<Vec2> s;
  std::vector<Vec2> m;
  std::vector<double> lfs;
  std::vector<double> mu;
  std::vector<double> rho;
  double k = 0;
  double d_s = 0;
};

// The automatic route: samples, medial axis, lfs, then mu and rho.
SizingModel automatic_sizing(const Shape& shape, const GeometryGrid& grid, double k,
                             bool include_outer, const SizingParams& params, std::uint64_t seed,
                             const Parallel& par = {});

}  // namespace trime
