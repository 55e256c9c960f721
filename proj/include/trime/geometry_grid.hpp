#pragma once

#include <cstdint>
#include <vector>

#include "trime/parallel.hpp"
#include "trime/shape.hpp"
#include "trime/vec2.hpp"

namespace trime {

enum class CellCategory : std::uint8_t { Inner, Boundary, Outer };
enum class PointCategory : std::uint8_t { Inner, Boundary };

const char* category_name(PointCategory c);

// Quadtree of bilinear patches over one boundary cell. Node corners hold
// exact sdf values in the order (x0,y0), (x1,y0), (x0,y1), (x1,y1); children
// are stored consecutively as lower-left, lower-right, upper-left,
// upper-right.
class AdfCell {
 public:
  struct Node {
    double v[4];
    std::int32_t first_child = -1;
  };

  AdfCell() = default;
  AdfCell(const Shape& shape, const Box& cell, double tolerance, int max_depth);

  double query(Vec2 p) const;
  // Depth of the leaf containing p.
  int leaf_depth(Vec2 p) const;
  int depth() const { return depth_; }
  double tolerance() const { return tolerance_; }
  const Box& box() const { return box_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  Box box_;
  double tolerance_ = 0;
  int depth_ = 0;
  std::vector<Node> nodes_;
};

struct AdaptiveFactors {
  double fac_retria = 0.1;
  double fac_end = 0.001;
  double fac_pt = 0.4;
  double fac_geps = 0.01;
};

class GeometryGrid {
 public:
  // Lattice dimensions for a domain: fac_grid * ceil(lambda * L) per axis.
  static std::pair<int, int> dimensions(const Box& domain, long long n_total, double n_opt,
                                        int fac_grid);

  GeometryGrid() = default;
  GeometryGrid(const Shape& shape, const Box& domain, long long n_total, double n_opt,
               int fac_grid, const Parallel& par = {});

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int cell_count() const { return nx_ * ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  const Box& box() const { return box_; }

  // -1 when p is outside the domain box.
  int cell_of(Vec2 p) const;
  int index(int i, int j) const { return j * nx_ + i; }
  int column(int c) const { return c % nx_; }
  int row(int c) const { return c / nx_; }
  Vec2 midpoint(int c) const;
  Box cell_box(int c) const;
  CellCategory category(int c) const { return category_[c]; }
  // Points outside the domain box count as outer.
  CellCategory category_at(Vec2 p) const;
  double midpoint_sdf(int c) const { return mid_sdf_[c]; }
  const std::vector<int>& boundary_cells() const { return boundary_cells_; }

  // Narrow-band boundary cells that take part in point initialization.
  void select_boundary_cells(double eta);
  bool selected(int c) const { return selected_[c] != 0; }
  // Inner cells and selected boundary cells.
  bool seeding_cell(int c) const {
    return category_[c] == CellCategory::Inner || selected_[c] != 0;
  }

  // rho_norm is per cell, normalized over the seeding cells.
  void compute_adaptive(const std::vector<double>& rho_norm, long long n_current,
                        const AdaptiveFactors& f);
  void rescale(long long n_old, long long n_current);

  double h(int c) const { return h_[c]; }
  double h_avg() const { return h_avg_; }
  double geps(int c) const { return geps_[c]; }
  double deps(int c) const { return deps_[c]; }
  double t_retria(int c) const { return factors_.fac_retria * h_[c]; }
  double t_end(int c) const { return factors_.fac_end * h_[c]; }
  double t_pt(int c) const { return factors_.fac_pt * h_[c]; }
  const AdaptiveFactors& factors() const { return factors_; }

  // E_tol = fac_etol * geps_i * sqrt(n_current / n_total), fixed at build time.
  void build_adf(const Shape& shape, double fac_etol, long long n_current, long long n_total,
                 int max_depth, const Parallel& par = {});
  bool has_adf() const { return !adf_.empty(); }
  const AdfCell& adf_cell(int c) const;
  // Throws NotBoundaryCell unless p lies in a boundary cell.
  double adf(Vec2 p) const;
  double adf_in_cell(int c, Vec2 p) const { return adf_[adf_index_[c]].query(p); }

 private:
  int nx_ = 0;
  int ny_ = 0;
  double dx_ = 0;
  double dy_ = 0;
  Box box_;
  std::vector<CellCategory> category_;
  std::vector<double> mid_sdf_;
  std::vector<int> boundary_cells_;
  std::vector<char> selected_;
  std::vector<double> h_;
  std::vector<double> geps_;
  std::vector<double> deps_;
  double h_avg_ = 0;
  AdaptiveFactors factors_;
  std::vector<std::int32_t> adf_index_;
  std::vector<AdfCell> adf_;
};

}  // namespace trime
