#include "trime/point_treatment.hpp"

#include <cmath>
#include <limits>

#include "trime/error.hpp"

namespace trime {

bool try_sphere_trace(Vec2 p_old, Vec2 p_new, const Shape& shape, double tol, int max_steps,
                      Vec2& out) {
  const Vec2 d = p_new - p_old;
  const double len = norm(d);
  if (len == 0) {
    out = p_old;
    return std::abs(shape.sdf(p_old)) <= tol;
  }
  const Vec2 dir = d / len;
  double t = 0;
  for (int step = 0; step <= max_steps; ++step) {
    const Vec2 p = p_old + dir * t;
    const double s = shape.sdf(p);
    if (std::abs(s) <= tol) {
      out = p;
      return true;
    }
    if (step == max_steps) break;
    t += std::abs(s);
    if (t > len) {
      // Never crossed within the segment; accept the end only if it is on the boundary.
      if (std::abs(shape.sdf(p_new)) <= tol) {
        out = p_new;
        return true;
      }
      return false;
    }
  }
  return false;
}

Vec2 sphere_trace(Vec2 p_old, Vec2 p_new, const Shape& shape, double tol, int max_steps) {
  Vec2 out;
  if (!try_sphere_trace(p_old, p_new, shape, tol, max_steps, out)) {
    throw Error(ErrorCode::NoConvergence, "sphere tracing did not reach the boundary");
  }
  return out;
}

bool try_newton_project(Vec2 p_new, const Shape& shape, double geps, double deps,
                        const ProjectionParams& params, Vec2& out) {
  if (!(deps > 0)) throw Error(ErrorCode::InvalidArgument, "finite difference step must be positive");
  // eps^(1/4) relative step for second differences, on the same length scale as deps.
  const double wide = deps * std::pow(std::numeric_limits<double>::epsilon(), -0.25);
  Vec2 p = p_new;
  double f = shape.sdf(p);
  for (int k = 0; k < params.newton_steps && !(std::abs(f) <= geps); ++k) {
    const double fx = (shape.sdf({p.x + deps, p.y}) - shape.sdf({p.x - deps, p.y})) / (2 * deps);
    const double fy = (shape.sdf({p.x, p.y + deps}) - shape.sdf({p.x, p.y - deps})) / (2 * deps);
    const double h = wide;
    const double fc = shape.sdf(p);
    const double fxx = (shape.sdf({p.x + h, p.y}) - 2 * fc + shape.sdf({p.x - h, p.y})) / (h * h);
    const double fyy = (shape.sdf({p.x, p.y + h}) - 2 * fc + shape.sdf({p.x, p.y - h})) / (h * h);
    const double fxy = (shape.sdf({p.x + h, p.y + h}) - shape.sdf({p.x + h, p.y - h}) -
                        shape.sdf({p.x - h, p.y + h}) + shape.sdf({p.x - h, p.y - h})) /
                       (4 * h * h);
    const double ex = p.x - p_new.x;
    const double ey = p.y - p_new.y;
    const double l1 = f;
    const double l2 = ex * fy - ey * fx;
    const double j11 = fx;
    const double j12 = fy;
    const double j21 = fy + ex * fxy - ey * fxx;
    const double j22 = -fx - ey * fxy + ex * fyy;
    const double det = j11 * j22 - j12 * j21;
    if (!(std::abs(det) > 1e-300) || !std::isfinite(det)) return false;
    const double sx = (j22 * l1 - j12 * l2) / det;
    const double sy = (-j21 * l1 + j11 * l2) / det;
    p = {p.x - params.damping * sx, p.y - params.damping * sy};
    f = shape.sdf(p);
    if (!std::isfinite(f)) return false;
  }
  if (!(std::abs(f) <= geps)) return false;
  out = p;
  return true;
}

Vec2 newton_project(Vec2 p_new, const Shape& shape, double geps, double deps,
                    const ProjectionParams& params) {
  Vec2 out;
  if (!try_newton_project(p_new, shape, geps, deps, params, out)) {
    throw Error(ErrorCode::NewtonDiverged, "projection onto the boundary did not converge");
  }
  return out;
}

Treated treat_new_position(Vec2 p_old, PointCategory cat_old, Vec2 p_new, const GeometryGrid& grid,
                           const Shape& shape, const ProjectionParams& params) {
  const int c_old = grid.cell_of(p_old);
  if (c_old < 0) return {p_old, cat_old};

  // (1) bound the move length
  Vec2 move = p_new - p_old;
  const double len = norm(move);
  const double limit = grid.t_pt(c_old);
  if (len > limit) {
    move = move * (limit / len);
    p_new = p_old + move;
  }

  // (2) pull back out of outer cells along the move
  if (grid.category_at(p_new) == CellCategory::Outer) {
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (grid.category_at(p_old + move * mid) == CellCategory::Outer) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    p_new = p_old + move * lo;
  }

  const int c = grid.cell_of(p_new);
  if (c < 0 || grid.category(c) == CellCategory::Outer) return {p_old, cat_old};
  if (grid.category(c) == CellCategory::Inner) return {p_new, PointCategory::Inner};

  const double a = grid.adf_in_cell(c, p_new);
  const double geps = grid.geps(c);
  if (a <= geps) {
    return {p_new, std::abs(a) <= geps ? PointCategory::Boundary : PointCategory::Inner};
  }

  // (5) repair a point that left the shape
  Vec2 fixed;
  const bool ok = cat_old == PointCategory::Inner
                      ? try_sphere_trace(p_old, p_new, shape, geps, params.trace_steps, fixed)
                      : try_newton_project(p_new, shape, geps, grid.deps(c), params, fixed);
  if (!ok) return {p_old, cat_old};
  const int cf = grid.cell_of(fixed);
  if (cf < 0 || grid.category(cf) == CellCategory::Outer) return {p_old, cat_old};
  if (grid.category(cf) == CellCategory::Inner) return {fixed, PointCategory::Inner};
  const double af = grid.adf_in_cell(cf, fixed);
  if (std::abs(af) <= grid.geps(cf)) return {fixed, PointCategory::Boundary};
  if (af < 0) return {fixed, PointCategory::Inner};
  if (std::abs(shape.sdf(fixed)) <= grid.geps(cf)) return {fixed, PointCategory::Boundary};
  return {p_old, cat_old};
}

}  // namespace trime
