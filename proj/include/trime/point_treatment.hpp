#pragma once

#include "trime/geometry_grid.hpp"
#include "trime/shape.hpp"
#include "trime/vec2.hpp"

namespace trime {

struct ProjectionParams {
  double damping = 1.0;      // Newton damping alpha-hat
  int newton_steps = 10;     // T_newton_ct
  int trace_steps = 100;     // sphere tracing step cap
};

// March from p_old towards p_new using |sdf| as the step length until
// |sdf| <= tol. Throws NoConvergence when the step cap runs out or the
// segment never reaches the boundary.
Vec2 sphere_trace(Vec2 p_old, Vec2 p_new, const Shape& shape, double tol, int max_steps = 100);
bool try_sphere_trace(Vec2 p_old, Vec2 p_new, const Shape& shape, double tol, int max_steps,
                      Vec2& out);

// Damped Newton solve of [f(p), (x - xn) f_y(p) - (y - yn) f_x(p)] = 0 from
// p_new. First derivatives use central differences with step deps; second
// derivatives use a wider step so they are not swamped by rounding. Throws
// NewtonDiverged if the result is not within geps of the boundary.
Vec2 newton_project(Vec2 p_new, const Shape& shape, double geps, double deps,
                    const ProjectionParams& params = {});
bool try_newton_project(Vec2 p_new, const Shape& shape, double geps, double deps,
                        const ProjectionParams& params, Vec2& out);

struct Treated {
  Vec2 p;
  PointCategory category;
};

Treated treat_new_position(Vec2 p_old, PointCategory cat_old, Vec2 p_new, const GeometryGrid& grid,
                           const Shape& shape, const ProjectionParams& params = {});

}  // namespace trime
