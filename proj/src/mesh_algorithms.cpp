#include "trime/mesh_algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trime/error.hpp"

namespace trime {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::DistMesh:
      return "dm";
    case Algorithm::Cvd:
      return "cvd";
    case Algorithm::Hybrid:
      return "hybrid";
  }
  return "dm";
}

std::vector<Edge> unique_edges(std::span<const Tri> tris) {
  std::vector<Edge> edges;
  edges.reserve(tris.size() * 3);
  for (const Tri& t : tris) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = t[k];
      const std::uint32_t b = t[(k + 1) % 3];
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

SpringSystem::SpringSystem(std::span<const Tri> tris, std::size_t n_points)
    : edges(unique_edges(tris)) {
  offsets.assign(n_points + 1, 0);
  for (const Edge& e : edges) {
    ++offsets[e[0] + 1];
    ++offsets[e[1] + 1];
  }
  for (std::size_t i = 0; i < n_points; ++i) offsets[i + 1] += offsets[i];
  incident.resize(offsets.back());
  std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::uint32_t k = 0; k < edges.size(); ++k) {
    incident[fill[edges[k][0]]++] = k;
    incident[fill[edges[k][1]]++] = k;
  }
}

double spring_force(double l, double l0, double k) { return l < l0 ? k * (l0 - l) : 0.0; }

std::vector<Vec2> distmesh_forces(std::span<const Vec2> points, const SpringSystem& springs,
                                  std::span<const double> edge_mu, const DistMeshParams& params,
                                  const Parallel& par, double* fac_mu_out) {
  const auto& edges = springs.edges;
  const std::size_t m = edges.size();
  if (m == 0) throw Error(ErrorCode::EmptyTriangulation, "no edges to build springs from");
  const double sum_l2 = par.block_sum(m, 0.0, [&](std::size_t e) {
    return norm2(points[edges[e][0]] - points[edges[e][1]]);
  });
  const double sum_mu2 = par.block_sum(m, 0.0, [&](std::size_t e) { return edge_mu[e] * edge_mu[e]; });
  const double fac_mu = std::sqrt(sum_l2 / sum_mu2);
  if (fac_mu_out) *fac_mu_out = fac_mu;

  std::vector<Vec2> fe(m);
  par.for_each(m, [&](std::size_t e) {
    const Vec2 d = points[edges[e][0]] - points[edges[e][1]];
    const double l = norm(d);
    const double l0 = edge_mu[e] * params.fac_f * fac_mu;
    const double f = spring_force(l, l0, params.k);
    fe[e] = (l > 0 && f > 0) ? d * (f / l) : Vec2{};
  });
  std::vector<Vec2> force(points.size());
  par.for_each(points.size(), [&](std::size_t i) {
    Vec2 acc;
    for (std::uint32_t t = springs.offsets[i]; t < springs.offsets[i + 1]; ++t) {
      const std::uint32_t e = springs.incident[t];
      if (edges[e][0] == i) {
        acc += fe[e];
      } else {
        acc -= fe[e];
      }
    }
    force[i] = acc;
  });
  return force;
}

std::vector<double> edge_sizing(std::span<const Vec2> points, std::span<const Edge> edges,
                                const GeometryGrid& grid, std::span<const double> mu) {
  std::vector<double> out(edges.size());
  auto at = [&](Vec2 p) {
    const int c = grid.cell_of(p);
    return c < 0 ? std::numeric_limits<double>::quiet_NaN() : mu[c];
  };
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Vec2 a = points[edges[e][0]];
    const Vec2 b = points[edges[e][1]];
    double v = at(midpoint(a, b));
    if (!(v > 0)) {
      const double va = at(a);
      const double vb = at(b);
      v = std::fmin(va > 0 ? va : vb, vb > 0 ? vb : va);
    }
    out[e] = v > 0 ? v : 1.0;
  }
  return out;
}

std::vector<Vec2> distmesh_step(std::span<const Vec2> points, std::span<const char> frozen,
                                const SpringSystem& springs, const GeometryGrid& grid,
                                std::span<const double> mu, const DistMeshParams& params,
                                const Parallel& par) {
  const std::vector<double> emu = edge_sizing(points, springs.edges, grid, mu);
  const std::vector<Vec2> force = distmesh_forces(points, springs, emu, params, par);
  std::vector<Vec2> out(points.begin(), points.end());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!frozen[i]) out[i] = points[i] + force[i] * params.dt;
  }
  return out;
}

bool needs_retriangulation(std::span<const Vec2> points, std::span<const Vec2> snapshot,
                           const GeometryGrid& grid) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int c = grid.cell_of(points[i]);
    if (c < 0) return true;
    if (dist(points[i], snapshot[i]) > grid.t_retria(c)) return true;
  }
  return false;
}

namespace {

struct QuadTri {
  Vec2 a, b, c;
};

Vec2 weighted_centroid(const std::vector<QuadTri>& tris, const DensityFn& rho, bool& ok) {
  double w = 0;
  Vec2 acc;
  double area_sum = 0;
  Vec2 plain;
  for (const QuadTri& t : tris) {
    const double area = 0.5 * std::abs(cross(t.b - t.a, t.c - t.a));
    const Vec2 q = (t.a + t.b + t.c) / 3.0;
    const double wt = area * rho(q);
    w += wt;
    acc += q * wt;
    area_sum += area;
    plain += q * area;
  }
  ok = area_sum > 0;
  if (w > 0) return acc / w;
  return area_sum > 0 ? plain / area_sum : Vec2{};
}

void bisect_all(std::vector<QuadTri>& tris, std::vector<QuadTri>& scratch) {
  scratch.clear();
  scratch.reserve(tris.size() * 2);
  for (const QuadTri& t : tris) {
    const double lab = norm2(t.b - t.a);
    const double lbc = norm2(t.c - t.b);
    const double lca = norm2(t.a - t.c);
    if (lab >= lbc && lab >= lca) {
      const Vec2 m = midpoint(t.a, t.b);
      scratch.push_back({t.a, m, t.c});
      scratch.push_back({m, t.b, t.c});
    } else if (lbc >= lca) {
      const Vec2 m = midpoint(t.b, t.c);
      scratch.push_back({t.b, m, t.a});
      scratch.push_back({m, t.c, t.a});
    } else {
      const Vec2 m = midpoint(t.c, t.a);
      scratch.push_back({t.c, m, t.b});
      scratch.push_back({m, t.a, t.b});
    }
  }
  tris.swap(scratch);
}

}  // namespace

CentroidResult cvd_centroid(const VoronoiCell& cell, Vec2 generator, const DensityFn& rho,
                            double e_thres, int max_level) {
  if (!(cell.area > 0) || cell.vertices.size() < 3) {
    throw Error(ErrorCode::DegenerateCell, "Voronoi cell has zero area");
  }
  thread_local std::vector<QuadTri> tris;
  thread_local std::vector<QuadTri> scratch;
  tris.clear();
  const std::size_t m = cell.vertices.size();
  for (std::size_t k = 0; k < m; ++k) {
    tris.push_back({generator, cell.vertices[k], cell.vertices[k + 1 == m ? 0 : k + 1]});
  }
  bool ok = true;
  Vec2 prev = generator;
  Vec2 cur = weighted_centroid(tris, rho, ok);
  int level = 1;
  while (!(dist(prev, cur) < e_thres) && level < max_level) {
    bisect_all(tris, scratch);
    prev = cur;
    cur = weighted_centroid(tris, rho, ok);
    ++level;
  }
  return {cur, level};
}

std::vector<Vec2> cvd_step(std::span<const Vec2> points, std::span<const char> frozen,
                           std::span<const double> prev_move, std::span<const VoronoiCell> cells,
                           const GeometryGrid& grid, std::span<const double> rho,
                           const Parallel& par) {
  std::vector<Vec2> out(points.begin(), points.end());
  const DensityFn density = [&](Vec2 q) {
    const int c = grid.cell_of(q);
    return c < 0 ? 0.0 : rho[c];
  };
  const double fac_end = grid.factors().fac_end;
  par.for_each(points.size(), [&](std::size_t i) {
    if (frozen[i] || !(cells[i].area > 0)) return;
    const int c = grid.cell_of(points[i]);
    const double h = c < 0 ? grid.h_avg() : grid.h(c);
    const double eps_c = std::max(prev_move[i] / h, fac_end);
    const double e_thres = std::sqrt(cells[i].area) * eps_c;
    out[i] = cvd_centroid(cells[i], points[i], density, e_thres).centroid;
  });
  return out;
}

Phase hybrid_decide(Phase current, long long n_current, long long n_total, double alpha_change,
                    double t_switch) {
  if (current == Phase::Cvd) return Phase::Cvd;
  if (n_current == n_total && alpha_change < t_switch) return Phase::Cvd;
  return Phase::DistMesh;
}

Termination check_termination(const MeshState& state, const GeometryGrid& grid,
                              const TerminationParams& params) {
  const auto& h = state.history;
  if (state.n_current == state.n_total && h.size() >= 2) {
    const QualityRecord& a = h[h.size() - 2];
    const QualityRecord& b = h.back();
    if (relative_change(a.half_alpha, b.half_alpha) < params.t_end_quality &&
        relative_change(a.half_beta, b.half_beta) < params.t_end_quality &&
        relative_change(a.max_alpha, b.max_alpha) < params.t_end_alpha_max) {
      return {true, "quality"};
    }
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.category[i] != PointCategory::Inner || state.frozen[i]) continue;
    const int c = grid.cell_of(state.points[i]);
    if (c < 0 || !(state.prev_move[i] < grid.t_end(c))) return {};
  }
  return {true, "movement"};
}

}  // namespace trime
