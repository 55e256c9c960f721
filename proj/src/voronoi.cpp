#include "trime/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace trime {

PointBins::PointBins(std::span<const Vec2> points, const Box& box, double per_bin) : box_(box) {
  const double n = std::max<double>(1.0, static_cast<double>(points.size()));
  const double lambda = std::sqrt(n / (per_bin * box.area()));
  nx_ = std::max(1, static_cast<int>(std::ceil(lambda * box.width())));
  ny_ = std::max(1, static_cast<int>(std::ceil(lambda * box.height())));
  dx_ = box.width() / nx_;
  dy_ = box.height() / ny_;
  const std::size_t cells = static_cast<std::size_t>(nx_) * ny_;
  std::vector<std::uint32_t> where(points.size());
  offsets_.assign(cells + 1, 0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    where[k] = static_cast<std::uint32_t>(row_of(points[k].y) * nx_ + column_of(points[k].x));
    ++offsets_[where[k] + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  items_.resize(points.size());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t k = 0; k < points.size(); ++k) {
    items_[fill[where[k]]++] = static_cast<std::uint32_t>(k);
  }
}

int PointBins::column_of(double x) const {
  const double f = std::floor((x - box_.x0) / dx_);
  return static_cast<int>(std::clamp(f, 0.0, static_cast<double>(nx_ - 1)));
}

int PointBins::row_of(double y) const {
  const double f = std::floor((y - box_.y0) / dy_);
  return static_cast<int>(std::clamp(f, 0.0, static_cast<double>(ny_ - 1)));
}

namespace {

// Keeps the part of the convex polygon with dot(n, v) <= c. The new edge
// along the line gets `label`.
bool clip_halfplane(std::vector<Vec2>& v, std::vector<std::int32_t>& lab, Vec2 n, double c,
                    std::int32_t label) {
  const std::size_t count = v.size();
  thread_local std::vector<double> s;
  s.resize(count);
  bool any_out = false;
  for (std::size_t k = 0; k < count; ++k) {
    s[k] = dot(v[k], n) - c;
    any_out |= s[k] > 0;
  }
  if (!any_out) return false;
  thread_local std::vector<Vec2> nv;
  thread_local std::vector<std::int32_t> nl;
  nv.clear();
  nl.clear();
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t k1 = k + 1 == count ? 0 : k + 1;
    const double sa = s[k];
    const double sb = s[k1];
    if (sa < 0) {
      nv.push_back(v[k]);
      nl.push_back(lab[k]);
      if (sb > 0) {
        nv.push_back(v[k] + (v[k1] - v[k]) * (sa / (sa - sb)));
        nl.push_back(label);
      }
    } else if (sa == 0) {
      nv.push_back(v[k]);
      nl.push_back(sb > 0 ? label : lab[k]);
    } else if (sb < 0) {
      nv.push_back(v[k] + (v[k1] - v[k]) * (sa / (sa - sb)));
      nl.push_back(lab[k]);
    }
  }
  v.swap(nv);
  lab.swap(nl);
  return true;
}

double polygon_area(const std::vector<Vec2>& v) {
  double a = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    a += cross(v[k], v[k + 1 == v.size() ? 0 : k + 1]);
  }
  return 0.5 * a;
}

// Local (generator-relative) starting polygon.
void initial_local(Vec2 p, double span, const Box& box, std::vector<Vec2>& v,
                   std::vector<std::int32_t>& lab) {
  v.clear();
  lab.clear();
  const Box rel{box.x0 - p.x, box.x1 - p.x, box.y0 - p.y, box.y1 - p.y};
  if (!std::isfinite(span)) {
    v = {{rel.x0, rel.y0}, {rel.x1, rel.y0}, {rel.x1, rel.y1}, {rel.x0, rel.y1}};
    lab = {kWallBottom, kWallRight, kWallTop, kWallLeft};
    return;
  }
  constexpr double kPi = 3.14159265358979323846;
  for (int k = 0; k < 8; ++k) {
    const double a = (22.5 + 45.0 * k) * kPi / 180.0;
    v.push_back({span * std::cos(a), span * std::sin(a)});
    lab.push_back(kOctagonEdge);
  }
  clip_halfplane(v, lab, {0, -1}, -rel.y0, kWallBottom);
  clip_halfplane(v, lab, {1, 0}, rel.x1, kWallRight);
  clip_halfplane(v, lab, {0, 1}, rel.y1, kWallTop);
  clip_halfplane(v, lab, {-1, 0}, -rel.x0, kWallLeft);
}

double max_radius2(const std::vector<Vec2>& v) {
  double r = 0;
  for (const Vec2& q : v) r = std::max(r, norm2(q));
  return r;
}

}  // namespace

VoronoiCell initial_cell(Vec2 p, double span, const Box& box) {
  VoronoiCell cell;
  initial_local(p, span, box, cell.vertices, cell.labels);
  cell.area = polygon_area(cell.vertices);
  for (Vec2& q : cell.vertices) q += p;
  return cell;
}

bool clip_cell(std::vector<Vec2>& local, std::vector<std::int32_t>& labels, Vec2 u,
               std::int32_t label) {
  return clip_halfplane(local, labels, u, 0.5 * norm2(u), label);
}

VoronoiCell compute_bounded_cell(std::size_t i, std::span<const Vec2> points,
                                 const PointBins& bins, double span) {
  const Vec2 p = points[i];
  thread_local std::vector<Vec2> v;
  thread_local std::vector<std::int32_t> lab;
  initial_local(p, span, bins.box(), v, lab);
  double r2 = max_radius2(v);

  const int ci = bins.column_of(p.x);
  const int cj = bins.row_of(p.y);
  const Box& b = bins.box();
  const double inf = std::numeric_limits<double>::infinity();
  const int max_layer = std::max(bins.nx(), bins.ny());
  for (int layer = 0; layer <= max_layer; ++layer) {
    if (layer > 0) {
      // Points in this ring lie outside the block of the previous rings.
      const int in = layer - 1;
      const double left = ci - in > 0 ? p.x - (b.x0 + (ci - in) * bins.dx()) : inf;
      const double right = ci + in < bins.nx() - 1 ? b.x0 + (ci + in + 1) * bins.dx() - p.x : inf;
      const double down = cj - in > 0 ? p.y - (b.y0 + (cj - in) * bins.dy()) : inf;
      const double up = cj + in < bins.ny() - 1 ? b.y0 + (cj + in + 1) * bins.dy() - p.y : inf;
      const double reach = std::min({left, right, down, up});
      if (reach == inf || reach * reach >= 4 * r2) break;
    }
    const int j0 = std::max(cj - layer, 0);
    const int j1 = std::min(cj + layer, bins.ny() - 1);
    for (int j = j0; j <= j1; ++j) {
      const bool full_row = (j == cj - layer || j == cj + layer);
      const int step = full_row ? 1 : 2 * layer;
      for (int ii = ci - layer; ii <= ci + layer; ii += std::max(step, 1)) {
        if (ii < 0 || ii >= bins.nx()) continue;
        for (std::uint32_t k : bins.bin(ii, j)) {
          if (k == i) continue;
          const Vec2 u = points[k] - p;
          const double u2 = norm2(u);
          if (u2 == 0 || u2 >= 4 * r2) continue;
          if (clip_cell(v, lab, u, static_cast<std::int32_t>(k))) r2 = max_radius2(v);
        }
      }
    }
  }

  VoronoiCell cell;
  cell.area = polygon_area(v);
  cell.vertices.resize(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) cell.vertices[k] = v[k] + p;
  cell.labels = lab;
  return cell;
}

std::vector<VoronoiCell> compute_diagram(std::span<const Vec2> points, const PointBins& bins,
                                         std::span<const double> spans, const Parallel& par) {
  std::vector<VoronoiCell> cells(points.size());
  par.for_each(points.size(), [&](std::size_t i) {
    cells[i] = compute_bounded_cell(i, points, bins, spans[i]);
  });
  return cells;
}

std::vector<Tri> extract_delaunay(std::span<const VoronoiCell> cells, const Parallel& par) {
  const std::size_t n = cells.size();
  // Neighbours across edges that are not vanishingly short.
  std::vector<std::vector<std::int32_t>> strong(n);
  par.for_each(n, [&](std::size_t i) {
    const VoronoiCell& c = cells[i];
    const double tol = 1e-9 * std::sqrt(std::abs(c.area));
    const std::size_t m = c.vertices.size();
    auto& out = strong[i];
    out.clear();
    for (std::size_t k = 0; k < m; ++k) {
      if (c.labels[k] < 0) continue;
      if (dist(c.vertices[k], c.vertices[k + 1 == m ? 0 : k + 1]) >= tol) out.push_back(c.labels[k]);
    }
    std::sort(out.begin(), out.end());
  });
  auto mutual = [&](std::uint32_t i, std::int32_t j) {
    const auto& s = strong[j];
    return std::binary_search(s.begin(), s.end(), static_cast<std::int32_t>(i));
  };

  // succ pairs (a, b): around generator i, neighbour b follows neighbour a.
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> pairs(n);
  par.for_each(n, [&](std::size_t i) {
    const VoronoiCell& c = cells[i];
    const double tol = 1e-9 * std::sqrt(std::abs(c.area));
    const std::size_t m = c.vertices.size();
    thread_local std::vector<std::int32_t> seq;
    seq.clear();
    for (std::size_t k = 0; k < m; ++k) {
      const std::int32_t l = c.labels[k];
      if (l >= 0) {
        if (dist(c.vertices[k], c.vertices[k + 1 == m ? 0 : k + 1]) < tol) continue;
        if (!mutual(static_cast<std::uint32_t>(i), l)) continue;
      }
      seq.push_back(l);
    }
    auto& out = pairs[i];
    out.clear();
    const std::size_t q = seq.size();
    if (q < 2) return;
    for (std::size_t k = 0; k < q; ++k) {
      const std::int32_t a = seq[k];
      const std::int32_t b = seq[k + 1 == q ? 0 : k + 1];
      if (a >= 0 && b >= 0 && a != b) out.emplace_back(a, b);
    }
  });
  auto pred = [&](std::int32_t cur, std::int32_t prev) -> std::int32_t {
    for (const auto& [a, b] : pairs[cur]) {
      if (b == prev) return a;
    }
    return -1;
  };

  std::vector<std::vector<Tri>> local(n);
  par.for_each(n, [&](std::size_t i) {
    const auto self = static_cast<std::int32_t>(i);
    for (const auto& [a, b] : pairs[i]) {
      if (a < self || b < self) continue;
      std::int32_t face[8];
      int len = 0;
      face[len++] = self;
      face[len++] = a;
      std::int32_t prev = self;
      std::int32_t cur = a;
      bool closed = false;
      bool ok = true;
      while (true) {
        const std::int32_t next = pred(cur, prev);
        if (next < 0 || next < self) {
          ok = false;
          break;
        }
        if (next == self) {
          closed = true;
          break;
        }
        if (len == 8 || std::find(face, face + len, next) != face + len) {
          ok = false;
          break;
        }
        face[len++] = next;
        prev = cur;
        cur = next;
      }
      if (!ok || !closed || len < 3 || face[len - 1] != b) continue;
      for (int k = 1; k + 1 < len; ++k) {
        local[i].push_back({static_cast<std::uint32_t>(face[0]), static_cast<std::uint32_t>(face[k]),
                            static_cast<std::uint32_t>(face[k + 1])});
      }
    }
  });
  std::vector<Tri> tris;
  for (const auto& l : local) tris.insert(tris.end(), l.begin(), l.end());
  return tris;
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  const double d = 2 * cross(ab, ac);
  const double ab2 = norm2(ab);
  const double ac2 = norm2(ac);
  return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

namespace {

// 1 inside or on the boundary, 0 outside, -1 when the grid cannot tell.
int classify(Vec2 p, const GeometryGrid& grid) {
  const int c = grid.cell_of(p);
  if (c < 0) return -1;
  switch (grid.category(c)) {
    case CellCategory::Inner:
      return 1;
    case CellCategory::Outer:
      return -1;
    case CellCategory::Boundary:
      return grid.adf_in_cell(c, p) <= grid.geps(c) ? 1 : 0;
  }
  return -1;
}

}  // namespace

bool triangle_valid(Vec2 a, Vec2 b, Vec2 c, const GeometryGrid& grid, const Shape& shape,
                    const ValidityParams& params) {
  const double area2 = cross(b - a, c - a);
  if (!(std::abs(area2) > 1e-300)) return false;

  const Vec2 g = (a + b + c) / 3.0;
  const int gc = grid.cell_of(g);
  if (gc < 0) return false;
  switch (grid.category(gc)) {
    case CellCategory::Inner:
      return true;
    case CellCategory::Outer:
      return false;
    case CellCategory::Boundary:
      if (grid.adf_in_cell(gc, g) > grid.geps(gc)) return false;
      break;
  }

  int inside = 0;
  bool all_known = true;
  for (Vec2 m : {midpoint(a, b), midpoint(b, c), midpoint(c, a)}) {
    const int k = classify(m, grid);
    if (k == 1) ++inside;
    if (k < 0) all_known = false;
  }
  if (inside >= 2) return true;
  if (all_known) return false;

  const Vec2 cc = circumcenter(a, b, c);
  const double r = dist(cc, a);
  const int cell = grid.cell_of(cc);
  const double s = (cell >= 0 && grid.category(cell) == CellCategory::Boundary)
                       ? grid.adf_in_cell(cell, cc)
                       : shape.sdf(cc);
  return !(std::abs(s) / r > params.t_tria_ccircum);
}

}  // namespace trime
