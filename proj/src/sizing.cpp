#include "trime/sizing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "trime/error.hpp"
#include "trime/random.hpp"
#include "trime/voronoi.hpp"

namespace trime {

namespace {

// Square-bin hash over a box for fixed-radius neighbour queries.
class RadiusBins {
 public:
  RadiusBins(std::span<const Vec2> pts, const Box& box, double cell) : box_(box) {
    nx_ = std::clamp(static_cast<int>(std::ceil(box.width() / cell)), 1, 4096);
    ny_ = std::clamp(static_cast<int>(std::ceil(box.height() / cell)), 1, 4096);
    dx_ = box.width() / nx_;
    dy_ = box.height() / ny_;
    offsets_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    std::vector<std::uint32_t> where(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
      where[k] = static_cast<std::uint32_t>(row(pts[k].y) * nx_ + col(pts[k].x));
      ++offsets_[where[k] + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    items_.resize(pts.size());
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t k = 0; k < pts.size(); ++k) items_[fill[where[k]]++] = static_cast<std::uint32_t>(k);
  }

  int col(double x) const {
    return static_cast<int>(std::clamp(std::floor((x - box_.x0) / dx_), 0.0, nx_ - 1.0));
  }
  int row(double y) const {
    return static_cast<int>(std::clamp(std::floor((y - box_.y0) / dy_), 0.0, ny_ - 1.0));
  }

  // Calls fn(k) for every point in bins overlapping the square of half-width r.
  template <typename Fn>
  void visit(Vec2 p, double r, Fn&& fn) const {
    const int i0 = col(p.x - r), i1 = col(p.x + r);
    const int j0 = row(p.y - r), j1 = row(p.y + r);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const std::size_t c = static_cast<std::size_t>(j) * nx_ + i;
        for (std::uint32_t t = offsets_[c]; t < offsets_[c + 1]; ++t) fn(items_[t]);
      }
    }
  }

 private:
  Box box_;
  int nx_ = 1;
  int ny_ = 1;
  double dx_ = 1;
  double dy_ = 1;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> items_;
};

}  // namespace

BoundaryTolerances boundary_tolerances(const GeometryGrid& grid, const SizingParams& p) {
  const double m = std::min(grid.dx(), grid.dy());
  return {p.fac_s * m, p.fac_geps * m, std::sqrt(std::numeric_limits<double>::epsilon()) * m};
}

std::vector<Vec2> generate_boundary_points(const Shape& shape, const GeometryGrid& grid,
                                           const SizingParams& params, std::uint64_t seed,
                                           const Parallel& par) {
  const BoundaryTolerances tol = boundary_tolerances(grid, params);
  std::vector<Vec2> out;

  std::vector<Segment> segs;
  shape.collect_segments(segs);
  const bool pure_contour = shape.as_contour() != nullptr;
  for (const Segment& s : segs) {
    const double len = s.length();
    const int pieces = len > tol.d_s ? static_cast<int>(std::floor(len / tol.d_s)) + 1 : 1;
    for (int t = 0; t < pieces; ++t) {
      const Vec2 q = t == 0 ? s.p1 : s.p1 + (s.p2 - s.p1) * (static_cast<double>(t) / pieces);
      if (pure_contour || std::abs(shape.sdf(q)) <= tol.geps_hat) out.push_back(q);
    }
  }

  if (!pure_contour) {
    Rng rng(seed);
    const auto& cells = grid.boundary_cells();
    std::vector<Vec2> seeds;
    seeds.reserve(cells.size() * params.n_grid);
    for (int c : cells) {
      const Box b = grid.cell_box(c);
      for (int k = 0; k < params.n_grid; ++k) {
        const double u = rng.uniform();
        const double w = rng.uniform();
        seeds.push_back({b.x0 + u * b.width(), b.y0 + w * b.height()});
      }
    }
    std::vector<Vec2> projected(seeds.size());
    std::vector<char> keep(seeds.size(), 0);
    const ProjectionParams proj;
    par.for_each(seeds.size(), [&](std::size_t k) {
      const Vec2 p = seeds[k];
      if (std::abs(shape.sdf(p)) <= tol.geps_hat) {
        projected[k] = p;
        keep[k] = 1;
      } else if (try_newton_project(p, shape, tol.geps_hat, tol.deps_hat, proj, projected[k])) {
        keep[k] = 1;
      }
    });
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      if (keep[k]) out.push_back(projected[k]);
    }
  }
  if (out.size() < 3) {
    throw Error(ErrorCode::ProjectionStarvation,
                "only " + std::to_string(out.size()) + " boundary points could be generated");
  }
  return out;
}

std::vector<Vec2> trim_boundary_points(std::vector<Vec2> pts, const Shape& shape, const Box& box,
                                       double d_s, double geps_hat) {
  if (pts.empty()) return pts;
  Box bounds = box;
  for (const Vec2& p : pts) {
    bounds.x0 = std::min(bounds.x0, p.x);
    bounds.x1 = std::max(bounds.x1, p.x);
    bounds.y0 = std::min(bounds.y0, p.y);
    bounds.y1 = std::max(bounds.y1, p.y);
  }
  const double reach = 1.5 * d_s;
  std::vector<char> alive(pts.size(), 1);
  struct Cand {
    double d;
    std::uint32_t j;
  };
  std::vector<Cand> cands;
  bool changed = true;
  while (changed) {
    changed = false;
    const RadiusBins bins(pts, bounds, reach);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!alive[i]) continue;
      cands.clear();
      bins.visit(pts[i], reach, [&](std::uint32_t j) {
        if (j == i || !alive[j]) return;
        const double d = dist(pts[i], pts[j]);
        if (d < d_s) cands.push_back({d, j});
      });
      std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return a.d < b.d || (a.d == b.d && a.j < b.j);
      });
      for (const Cand& c : cands) {
        const Vec2 m = midpoint(pts[i], pts[c.j]);
        if (std::abs(shape.sdf(m)) > geps_hat) continue;
        alive[c.j] = 0;
        pts[i] = m;
        changed = true;
        break;
      }
    }
    std::size_t w = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (alive[i]) pts[w++] = pts[i];
    }
    pts.resize(w);
    alive.assign(w, 1);
  }
  return pts;
}

std::vector<Vec2> medial_axis_points(std::span<const Vec2> s, const Box& box, const Parallel& par) {
  const PointBins bins(s, box, 3.3);
  std::vector<std::array<Vec2, 2>> found(s.size());
  std::vector<int> count(s.size(), 0);
  par.for_each(s.size(), [&](std::size_t i) {
    const VoronoiCell cell = compute_bounded_cell(i, s, bins, kUnboundedSpan);
    const Vec2 p = s[i];
    double best = -1;
    std::size_t k1 = 0;
    for (std::size_t k = 0; k < cell.vertices.size(); ++k) {
      const double d = dist(cell.vertices[k], p);
      if (d > best) {
        best = d;
        k1 = k;
      }
    }
    if (best <= 0) return;
    const Vec2 v1 = cell.vertices[k1];
    found[i][0] = v1;
    count[i] = 1;
    double best2 = -1;
    for (const Vec2& v : cell.vertices) {
      if (dot(v - p, v1 - p) >= 0) continue;
      const double d = dist(v, p);
      if (d > best2) {
        best2 = d;
        found[i][1] = v;
      }
    }
    if (best2 > 0) count[i] = 2;
  });
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (int k = 0; k < count[i]; ++k) out.push_back(found[i][k]);
  }
  return out;
}

std::vector<Vec2> interior_medial_points(std::span<const Vec2> m, const Shape& shape,
                                         const Box& box, double geps_hat) {
  std::vector<Vec2> out;
  for (const Vec2& p : m) {
    if (box.contains(p) && shape.sdf(p) < -geps_hat) out.push_back(p);
  }
  return out;
}

std::vector<Vec2> trim_medial_points(std::span<const Vec2> m, double r_nei, int n_thres) {
  if (m.empty()) return {};
  Box bounds{m[0].x, m[0].x, m[0].y, m[0].y};
  for (const Vec2& p : m) {
    bounds.x0 = std::min(bounds.x0, p.x);
    bounds.x1 = std::max(bounds.x1, p.x);
    bounds.y0 = std::min(bounds.y0, p.y);
    bounds.y1 = std::max(bounds.y1, p.y);
  }
  bounds.x1 = std::max(bounds.x1, bounds.x0 + r_nei);
  bounds.y1 = std::max(bounds.y1, bounds.y0 + r_nei);
  const RadiusBins bins(m, bounds, r_nei);
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    int n = 0;
    bins.visit(m[i], r_nei, [&](std::uint32_t j) {
      if (j != i && dist(m[i], m[j]) <= r_nei) ++n;
    });
    if (n >= n_thres) out.push_back(m[i]);
  }
  return out;
}

std::vector<double> compute_lfs(std::span<const Vec2> s, std::span<const Vec2> m, double diagonal,
                                const Parallel& par) {
  if (m.empty()) throw Error(ErrorCode::EmptyMedialAxis, "no medial axis points survived trimming");
  std::vector<double> lfs(s.size());
  par.for_each(s.size(), [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& q : m) best = std::min(best, dist(s[i], q));
    lfs[i] = best;
  });
  const double floor = 1e-12 * diagonal;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (lfs[i] < floor) {
      throw Error(ErrorCode::DegenerateLfs, "local feature size vanishes at boundary point (" +
                                                std::to_string(s[i].x) + ", " +
                                                std::to_string(s[i].y) + ")");
    }
  }
  return lfs;
}

std::vector<double> sizing_from_samples(const GeometryGrid& grid, std::span<const Vec2> s,
                                        std::span<const double> lfs, double k, bool include_outer,
                                        const Parallel& par) {
  const std::size_t n = static_cast<std::size_t>(grid.cell_count());
  std::vector<double> mu(n, std::numeric_limits<double>::quiet_NaN());
  par.for_each(n, [&](std::size_t c) {
    const int ci = static_cast<int>(c);
    if (!include_outer && grid.category(ci) == CellCategory::Outer) return;
    const Vec2 m = grid.midpoint(ci);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < s.size(); ++t) best = std::min(best, k * dist(s[t], m) + lfs[t]);
    mu[c] = best;
  });
  return mu;
}

std::vector<double> density_from_sizing(std::span<const double> mu) {
  std::vector<double> rho(mu.size(), 0.0);
  for (std::size_t c = 0; c < mu.size(); ++c) {
    if (mu[c] > 0 && std::isfinite(mu[c])) rho[c] = 1.0 / (mu[c] * mu[c]);
  }
  return rho;
}

SizingModel automatic_sizing(const Shape& shape, const GeometryGrid& grid, double k,
                             bool include_outer, const SizingParams& params, std::uint64_t seed,
                             const Parallel& par) {
  const BoundaryTolerances tol = boundary_tolerances(grid, params);
  SizingModel model;
  model.k = k;
  model.d_s = tol.d_s;
  model.s = trim_boundary_points(generate_boundary_points(shape, grid, params, seed, par), shape,
                                 grid.box(), tol.d_s, tol.geps_hat);
  const std::vector<Vec2> raw = medial_axis_points(model.s, grid.box(), par);
  const std::vector<Vec2> inside = interior_medial_points(raw, shape, grid.box(), tol.geps_hat);
  model.m = trim_medial_points(inside, params.fac_nei * params.n_nei_thres * tol.d_s,
                               params.n_nei_thres);
  model.lfs = compute_lfs(model.s, model.m, grid.box().diagonal(), par);
  model.mu = sizing_from_samples(grid, model.s, model.lfs, k, include_outer, par);
  model.rho = density_from_sizing(model.mu);
  return model;
}

}  // namespace trime
