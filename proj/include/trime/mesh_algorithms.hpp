#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "trime/geometry_grid.hpp"
#include "trime/parallel.hpp"
#include "trime/point_manager.hpp"
#include "trime/voronoi.hpp"

namespace trime {

enum class Algorithm { DistMesh, Cvd, Hybrid };
enum class Phase { DistMesh, Cvd };

const char* algorithm_name(Algorithm a);

using Edge = std::array<std::uint32_t, 2>;

// Unique undirected edges (smaller index first), sorted.
std::vector<Edge> unique_edges(std::span<const Tri> tris);

// Edge list plus a point -> incident edge index in CSR form, so forces can
// be gathered per point without shared writes.
struct SpringSystem {
  std::vector<Edge> edges;
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> incident;

  SpringSystem() = default;
  SpringSystem(std::span<const Tri> tris, std::size_t n_points);
};

struct DistMeshParams {
  double fac_f = 1.2;
  double k = 1.0;
  double dt = 0.2;
};

// Repulsive spring magnitude: k (l0 - l) when l < l0, zero otherwise.
double spring_force(double l, double l0, double k);

// Net internal force per point. mu(e) is the sizing value for edge e.
std::vector<Vec2> distmesh_forces(std::span<const Vec2> points, const SpringSystem& springs,
                                  std::span<const double> edge_mu, const DistMeshParams& params,
                                  const Parallel& par = {}, double* fac_mu_out = nullptr);

// Sizing at each edge midpoint's grid cell.
std::vector<double> edge_sizing(std::span<const Vec2> points, std::span<const Edge> edges,
                                const GeometryGrid& grid, std::span<const double> mu);

// p + dt F for every movable point. Throws EmptyTriangulation without edges.
std::vector<Vec2> distmesh_step(std::span<const Vec2> points, std::span<const char> frozen,
                                const SpringSystem& springs, const GeometryGrid& grid,
                                std::span<const double> mu, const DistMeshParams& params,
                                const Parallel& par = {});

// True if any point is farther than its cell's T_retria from its snapshot.
bool needs_retriangulation(std::span<const Vec2> points, std::span<const Vec2> snapshot,
                           const GeometryGrid& grid);

using DensityFn = std::function<double(Vec2)>;

struct CentroidResult {
  Vec2 centroid;
  int level = 0;
};

// Adaptive quadrature centroid: level 0 is the generator, level 1 fans the
// cell from the generator, each later level bisects every triangle at its
// longest edge. Stops once two successive levels agree within e_thres.
CentroidResult cvd_centroid(const VoronoiCell& cell, Vec2 generator, const DensityFn& rho,
                            double e_thres, int max_level = 12);

std::vector<Vec2> cvd_step(std::span<const Vec2> points, std::span<const char> frozen,
                           std::span<const double> prev_move, std::span<const VoronoiCell> cells,
                           const GeometryGrid& grid, std::span<const double> rho,
                           const Parallel& par = {});

Phase hybrid_decide(Phase current, long long n_current, long long n_total, double alpha_change,
                    double t_switch);

struct TerminationParams {
  double t_end_quality = 0.001;
  double t_end_alpha_max = 0.005;
};

struct Termination {
  bool stop = false;
  std::string reason;
};

Termination check_termination(const MeshState& state, const GeometryGrid& grid,
                              const TerminationParams& params);

}  // namespace trime
