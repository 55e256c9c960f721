#include "trime/geometry_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trime/error.hpp"

namespace trime {

const char* category_name(PointCategory c) {
  return c == PointCategory::Boundary ? "boundary" : "inner";
}

namespace {

double bilinear(const double v[4], double u, double w) {
  return (1 - u) * (1 - w) * v[0] + u * (1 - w) * v[1] + (1 - u) * w * v[2] + u * w * v[3];
}

}  // namespace

AdfCell::AdfCell(const Shape& shape, const Box& cell, double tolerance, int max_depth)
    : box_(cell), tolerance_(tolerance) {
  Node root;
  root.v[0] = shape.sdf({cell.x0, cell.y0});
  root.v[1] = shape.sdf({cell.x1, cell.y0});
  root.v[2] = shape.sdf({cell.x0, cell.y1});
  root.v[3] = shape.sdf({cell.x1, cell.y1});
  nodes_.push_back(root);

  struct Pending {
    std::int32_t node;
    Box box;
    int depth;
  };
  std::vector<Pending> stack{{0, cell, 0}};
  while (!stack.empty()) {
    const Pending cur = stack.back();
    stack.pop_back();
    depth_ = std::max(depth_, cur.depth);
    if (cur.depth >= max_depth) continue;
    const Box& b = cur.box;
    const double xm = 0.5 * (b.x0 + b.x1);
    const double ym = 0.5 * (b.y0 + b.y1);
    const double* v = nodes_[cur.node].v;
    // bottom, top, left, right edge midpoints, then the centroid
    const double s_b = shape.sdf({xm, b.y0});
    const double s_t = shape.sdf({xm, b.y1});
    const double s_l = shape.sdf({b.x0, ym});
    const double s_r = shape.sdf({b.x1, ym});
    const double s_c = shape.sdf({xm, ym});
    double err = std::abs(0.5 * (v[0] + v[1]) - s_b);
    err = std::max(err, std::abs(0.5 * (v[2] + v[3]) - s_t));
    err = std::max(err, std::abs(0.5 * (v[0] + v[2]) - s_l));
    err = std::max(err, std::abs(0.5 * (v[1] + v[3]) - s_r));
    err = std::max(err, std::abs(0.25 * (v[0] + v[1] + v[2] + v[3]) - s_c));
    if (!(err > tolerance_)) continue;

    const double c0 = v[0], c1 = v[1], c2 = v[2], c3 = v[3];
    const auto first = static_cast<std::int32_t>(nodes_.size());
    nodes_[cur.node].first_child = first;
    nodes_.push_back(Node{{c0, s_b, s_l, s_c}, -1});
    nodes_.push_back(Node{{s_b, c1, s_c, s_r}, -1});
    nodes_.push_back(Node{{s_l, s_c, c2, s_t}, -1});
    nodes_.push_back(Node{{s_c, s_r, s_t, c3}, -1});
    stack.push_back({first + 3, {xm, b.x1, ym, b.y1}, cur.depth + 1});
    stack.push_back({first + 2, {b.x0, xm, ym, b.y1}, cur.depth + 1});
    stack.push_back({first + 1, {xm, b.x1, b.y0, ym}, cur.depth + 1});
    stack.push_back({first + 0, {b.x0, xm, b.y0, ym}, cur.depth + 1});
  }
}

double AdfCell::query(Vec2 p) const {
  Box b = box_;
  std::int32_t n = 0;
  while (nodes_[n].first_child >= 0) {
    const double xm = 0.5 * (b.x0 + b.x1);
    const double ym = 0.5 * (b.y0 + b.y1);
    int q = 0;
    if (p.x >= xm) {
      q += 1;
      b.x0 = xm;
    } else {
      b.x1 = xm;
    }
    if (p.y >= ym) {
      q += 2;
      b.y0 = ym;
    } else {
      b.y1 = ym;
    }
    n = nodes_[n].first_child + q;
  }
  const double u = std::clamp((p.x - b.x0) / (b.x1 - b.x0), 0.0, 1.0);
  const double w = std::clamp((p.y - b.y0) / (b.y1 - b.y0), 0.0, 1.0);
  return bilinear(nodes_[n].v, u, w);
}

int AdfCell::leaf_depth(Vec2 p) const {
  Box b = box_;
  std::int32_t n = 0;
  int depth = 0;
  while (nodes_[n].first_child >= 0) {
    const double xm = 0.5 * (b.x0 + b.x1);
    const double ym = 0.5 * (b.y0 + b.y1);
    int q = 0;
    if (p.x >= xm) {
      q += 1;
      b.x0 = xm;
    } else {
      b.x1 = xm;
    }
    if (p.y >= ym) {
      q += 2;
      b.y0 = ym;
    } else {
      b.y1 = ym;
    }
    n = nodes_[n].first_child + q;
    ++depth;
  }
  return depth;
}

std::pair<int, int> GeometryGrid::dimensions(const Box& domain, long long n_total, double n_opt,
                                             int fac_grid) {
  const double lambda = std::sqrt(static_cast<double>(n_total) / (n_opt * domain.area()));
  const int nx = fac_grid * static_cast<int>(std::ceil(lambda * domain.width()));
  const int ny = fac_grid * static_cast<int>(std::ceil(lambda * domain.height()));
  return {std::max(nx, 1), std::max(ny, 1)};
}

GeometryGrid::GeometryGrid(const Shape& shape, const Box& domain, long long n_total, double n_opt,
                           int fac_grid, const Parallel& par)
    : box_(domain) {
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) {
    throw Error(ErrorCode::DegenerateDomain, "domain box has non-positive extent");
  }
  if (n_total < 1) throw Error(ErrorCode::InvalidArgument, "N_total must be at least 1");
  std::tie(nx_, ny_) = dimensions(domain, n_total, n_opt, fac_grid);
  dx_ = domain.width() / nx_;
  dy_ = domain.height() / ny_;
  const std::size_t n = static_cast<std::size_t>(nx_) * ny_;
  category_.assign(n, CellCategory::Outer);
  mid_sdf_.assign(n, 0.0);
  const double l_diag = std::hypot(dx_, dy_);
  par.for_each(n, [&](std::size_t c) {
    const double s = shape.sdf(midpoint(static_cast<int>(c)));
    mid_sdf_[c] = s;
    if (std::abs(s) <= l_diag) {
      category_[c] = CellCategory::Boundary;
    } else if (s < 0) {
      category_[c] = CellCategory::Inner;
    }
  });
  for (std::size_t c = 0; c < n; ++c) {
    if (category_[c] == CellCategory::Boundary) boundary_cells_.push_back(static_cast<int>(c));
  }
  selected_.assign(n, 0);
}

int GeometryGrid::cell_of(Vec2 p) const {
  if (!(p.x >= box_.x0 && p.x <= box_.x1 && p.y >= box_.y0 && p.y <= box_.y1)) return -1;
  const int i = std::min(static_cast<int>((p.x - box_.x0) / dx_), nx_ - 1);
  const int j = std::min(static_cast<int>((p.y - box_.y0) / dy_), ny_ - 1);
  return j * nx_ + i;
}

Vec2 GeometryGrid::midpoint(int c) const {
  return {box_.x0 + (column(c) + 0.5) * dx_, box_.y0 + (row(c) + 0.5) * dy_};
}

Box GeometryGrid::cell_box(int c) const {
  const double x0 = box_.x0 + column(c) * dx_;
  const double y0 = box_.y0 + row(c) * dy_;
  return {x0, column(c) == nx_ - 1 ? box_.x1 : x0 + dx_, y0,
          row(c) == ny_ - 1 ? box_.y1 : y0 + dy_};
}

CellCategory GeometryGrid::category_at(Vec2 p) const {
  const int c = cell_of(p);
  return c < 0 ? CellCategory::Outer : category_[c];
}

void GeometryGrid::select_boundary_cells(double eta) {
  const double band = eta * std::min(dx_, dy_);
  for (int c : boundary_cells_) selected_[c] = mid_sdf_[c] <= band ? 1 : 0;
}

void GeometryGrid::compute_adaptive(const std::vector<double>& rho_norm, long long n_current,
                                    const AdaptiveFactors& f) {
  factors_ = f;
  const std::size_t n = category_.size();
  h_.assign(n, std::numeric_limits<double>::quiet_NaN());
  geps_.assign(n, 0.0);
  deps_.assign(n, 0.0);
  double sum = 0;
  long long count = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (category_[c] == CellCategory::Outer && !(rho_norm[c] > 0)) continue;
    const double ne = rho_norm[c] * static_cast<double>(n_current);
    if (!(ne > 0)) {
      if (category_[c] == CellCategory::Inner) {
        throw Error(ErrorCode::ZeroDensityCell,
                    "inner cell " + std::to_string(c) + " has zero expected point count");
      }
      continue;
    }
    h_[c] = std::sqrt(dx_ * dy_ / ne);
    if (seeding_cell(static_cast<int>(c))) {
      sum += h_[c];
      ++count;
    }
  }
  h_avg_ = count > 0 ? sum / count : std::sqrt(box_.area() / static_cast<double>(n_current));
  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  for (std::size_t c = 0; c < n; ++c) {
    if (std::isnan(h_[c])) h_[c] = h_avg_;
    const double base = std::min(h_[c], h_avg_);
    geps_[c] = f.fac_geps * base;
    deps_[c] = root_eps * base;
  }
}

void GeometryGrid::rescale(long long n_old, long long n_current) {
  const double s = std::sqrt(static_cast<double>(n_old) / static_cast<double>(n_current));
  for (double& v : h_) v *= s;
  for (double& v : geps_) v *= s;
  for (double& v : deps_) v *= s;
  h_avg_ *= s;
}

void GeometryGrid::build_adf(const Shape& shape, double fac_etol, long long n_current,
                             long long n_total, int max_depth, const Parallel& par) {
  adf_index_.assign(category_.size(), -1);
  adf_.assign(boundary_cells_.size(), AdfCell{});
  const double fac_pt =
      std::sqrt(static_cast<double>(n_current) / static_cast<double>(n_total));
  par.for_each(boundary_cells_.size(), [&](std::size_t k) {
    const int c = boundary_cells_[k];
    adf_[k] = AdfCell(shape, cell_box(c), fac_etol * geps_[c] * fac_pt, max_depth);
  });
  for (std::size_t k = 0; k < boundary_cells_.size(); ++k) {
    adf_index_[boundary_cells_[k]] = static_cast<std::int32_t>(k);
  }
}

const AdfCell& GeometryGrid::adf_cell(int c) const {
  if (c < 0 || category_[c] != CellCategory::Boundary || adf_index_.empty()) {
    throw Error(ErrorCode::NotBoundaryCell, "cell " + std::to_string(c) + " has no ADF");
  }
  return adf_[adf_index_[c]];
}

double GeometryGrid::adf(Vec2 p) const { return adf_cell(cell_of(p)).query(p); }

}  // namespace trime
