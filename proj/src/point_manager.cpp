#include "trime/point_manager.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "trime/error.hpp"
#include "trime/random.hpp"

namespace trime {

void MeshState::add_point(Vec2 p, PointCategory c, bool fixed) {
  points.push_back(p);
  category.push_back(c);
  prev_move.push_back(std::numeric_limits<double>::infinity());
  snapshot.push_back(p);
  frozen.push_back(fixed ? 1 : 0);
}

double half_mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyList, "half mean of an empty list");
  double s = 0;
  for (double v : values) s += std::sqrt(v);
  s /= static_cast<double>(values.size());
  return s * s;
}

TriangleQuality triangle_quality(Vec2 a, Vec2 b, Vec2 c) {
  const double area = 0.5 * std::abs(cross(b - a, c - a));
  if (!(area > 1e-300)) throw Error(ErrorCode::DegenerateTriangle, "triangle has zero area");
  const double la = dist(b, c);
  const double lb = dist(c, a);
  const double lc = dist(a, b);
  TriangleQuality q;
  q.r_circum = la * lb * lc / (4 * area);
  q.r_in = area / (0.5 * (la + lb + lc));
  q.alpha = q.r_circum / (2 * q.r_in);
  q.l_max = std::max({la, lb, lc});
  q.l_min = std::min({la, lb, lc});
  q.beta = q.l_max / q.l_min;
  q.circumcenter = trime::circumcenter(a, b, c);
  q.centroid = (a + b + c) / 3.0;
  return q;
}

QualityRecord quality_stats(std::span<const Vec2> points, std::span<const Tri> tris,
                            const Parallel& par) {
  QualityRecord r;
  r.triangles = tris.size();
  if (tris.empty()) return r;
  std::vector<double> alpha(tris.size());
  std::vector<double> beta(tris.size());
  par.for_each(tris.size(), [&](std::size_t t) {
    const Vec2 a = points[tris[t][0]], b = points[tris[t][1]], c = points[tris[t][2]];
    const double area = 0.5 * std::abs(cross(b - a, c - a));
    if (!(area > 1e-300)) {
      alpha[t] = beta[t] = std::numeric_limits<double>::infinity();
      return;
    }
    const TriangleQuality q = triangle_quality(a, b, c);
    alpha[t] = q.alpha;
    beta[t] = q.beta;
  });
  const double n = static_cast<double>(tris.size());
  const double sa = par.block_sum(tris.size(), 0.0, [&](std::size_t t) { return std::sqrt(alpha[t]); });
  const double sb = par.block_sum(tris.size(), 0.0, [&](std::size_t t) { return std::sqrt(beta[t]); });
  r.half_alpha = (sa / n) * (sa / n);
  r.half_beta = (sb / n) * (sb / n);
  r.max_alpha = *std::max_element(alpha.begin(), alpha.end());
  return r;
}

double relative_change(double prev, double cur) { return std::abs(cur - prev) / prev; }

std::vector<double> normalize_density(const GeometryGrid& grid, std::span<const double> rho) {
  double total = 0;
  for (int c = 0; c < grid.cell_count(); ++c) {
    if (grid.seeding_cell(c)) total += rho[c];
  }
  std::vector<double> out(rho.size(), 0.0);
  if (!(total > 0)) return out;
  for (std::size_t c = 0; c < rho.size(); ++c) out[c] = rho[c] / total;
  return out;
}

std::vector<int> dither_counts(const GeometryGrid& grid, std::span<const double> rho_norm,
                               long long n) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  std::vector<int> count(static_cast<std::size_t>(nx) * ny, 0);
  std::vector<double> carry(count.size(), 0.0);
  auto valid = [&](int i, int j) {
    return i >= 0 && i < nx && j >= 0 && j < ny && grid.seeding_cell(grid.index(i, j));
  };
  long long total = 0;
  for (int j = ny - 1; j >= 0; --j) {
    for (int i = 0; i < nx; ++i) {
      const int c = grid.index(i, j);
      if (!grid.seeding_cell(c)) continue;
      const double v = rho_norm[c] * static_cast<double>(n) + carry[c];
      const long long k = std::max(0LL, std::llround(v));
      count[c] = static_cast<int>(k);
      total += k;
      const double residual = v - static_cast<double>(k);
      const int ni[4] = {i + 1, i - 1, i, i + 1};
      const int nj[4] = {j, j - 1, j - 1, j - 1};
      int m = 0;
      for (int t = 0; t < 4; ++t) m += valid(ni[t], nj[t]) ? 1 : 0;
      if (m == 0) continue;
      for (int t = 0; t < 4; ++t) {
        if (valid(ni[t], nj[t])) carry[grid.index(ni[t], nj[t])] += residual / m;
      }
    }
  }

  if (total != n) {
    std::vector<int> order;
    for (int c = 0; c < grid.cell_count(); ++c) {
      if (grid.seeding_cell(c)) order.push_back(c);
    }
    if (order.empty()) throw Error(ErrorCode::InvalidState, "no cells available for points");
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return rho_norm[a] > rho_norm[b]; });
    std::size_t k = 0;
    while (total < n) {
      ++count[order[k]];
      ++total;
      k = (k + 1) % order.size();
    }
    std::size_t misses = 0;
    while (total > n && misses < order.size()) {
      if (count[order[k]] > 0) {
        --count[order[k]];
        --total;
        misses = 0;
      } else {
        ++misses;
      }
      k = (k + 1) % order.size();
    }
  }
  return count;
}

PointCategory categorize(Vec2 p, const GeometryGrid& grid) {
  const int c = grid.cell_of(p);
  if (c < 0 || grid.category(c) != CellCategory::Boundary) return PointCategory::Inner;
  return std::abs(grid.adf_in_cell(c, p)) <= grid.geps(c) ? PointCategory::Boundary
                                                          : PointCategory::Inner;
}

void init_points(MeshState& state, const GeometryGrid& grid, const Shape& shape,
                 std::span<const double> rho_norm, long long n, std::uint64_t seed,
                 const ProjectionParams& proj) {
  const std::vector<int> counts = dither_counts(grid, rho_norm, n);
  Rng rng(seed);
  constexpr int kAttempts = 64;
  for (int c = 0; c < grid.cell_count(); ++c) {
    const Box b = grid.cell_box(c);
    const bool boundary = grid.category(c) == CellCategory::Boundary;
    for (int k = 0; k < counts[c]; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
        Vec2 p{b.x0 + rng.uniform() * b.width(), b.y0 + rng.uniform() * b.height()};
        if (boundary && grid.adf_in_cell(c, p) > grid.geps(c)) {
          Vec2 q;
          if (!try_newton_project(p, shape, grid.geps(c), grid.deps(c), proj, q)) continue;
          if (grid.category_at(q) == CellCategory::Outer) continue;
          p = q;
        }
        state.add_point(p, categorize(p, grid));
        placed = true;
      }
      if (!placed) {
        throw Error(ErrorCode::ProjectionStarvation,
                    "could not place a point inside the shape in cell " + std::to_string(c));
      }
    }
  }
}

long long maybe_add_points(MeshState& state, GeometryGrid& grid, const AdditionParams& params) {
  if (state.n_current >= state.n_total || state.history.size() < 2) return 0;
  const QualityRecord& prev = state.history[state.history.size() - 2];
  const QualityRecord& cur = state.history.back();
  if (!(relative_change(prev.half_alpha, cur.half_alpha) < params.t_add_quality &&
        relative_change(prev.half_beta, cur.half_beta) < params.t_add_quality)) {
    return 0;
  }
  const long long want = std::min(std::llround(params.fac_add * static_cast<double>(state.n_current)),
                                  state.n_total - state.n_current);
  if (want <= 0) return 0;

  struct Ranked {
    double ratio;
    Vec2 centroid;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(state.triangles.size());
  for (const Tri& t : state.triangles) {
    const Vec2 a = state.points[t[0]], b = state.points[t[1]], c = state.points[t[2]];
    const double area = 0.5 * std::abs(cross(b - a, c - a));
    if (!(area > 1e-300)) continue;
    const TriangleQuality q = triangle_quality(a, b, c);
    const int cell = grid.cell_of(q.centroid);
    if (cell < 0) continue;
    ranked.push_back({q.r_circum / grid.h(cell), q.centroid});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& x, const Ranked& y) { return x.ratio > y.ratio; });

  long long added = 0;
  for (const Ranked& r : ranked) {
    if (added == want) break;
    const int cell = grid.cell_of(r.centroid);
    if (grid.category(cell) == CellCategory::Outer) continue;
    if (grid.category(cell) == CellCategory::Boundary &&
        grid.adf_in_cell(cell, r.centroid) > grid.geps(cell)) {
      continue;
    }
    state.add_point(r.centroid, categorize(r.centroid, grid));
    ++added;
  }
  if (added > 0) {
    const long long old = state.n_current;
    state.n_current += added;
    grid.rescale(old, state.n_current);
  }
  return added;
}

}  // namespace trime
