#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trime/config.hpp"
#include "trime/geometry_grid.hpp"
#include "trime/mesh_algorithms.hpp"
#include "trime/mesh_io.hpp"
#include "trime/point_manager.hpp"
#include "trime/shape.hpp"
#include "trime/sizing.hpp"
#include "trime/voronoi.hpp"

namespace trime {

struct RunReport {
  long long iterations = 0;
  std::string reason;
  double seconds = 0;
  SummaryStats summary;
};

// One meshing run. initialize() builds the shape, grid, sizing and initial
// points; step() performs one iteration and returns true once terminated.
class Mesher {
 public:
  explicit Mesher(Config cfg);

  void initialize();
  bool step();
  // initialize() if needed, iterate to termination, finalize().
  RunReport run(bool write_files = true);
  // Final triangulation and summary; writes final files when asked.
  RunReport finalize(bool write_files);

  const Config& config() const { return cfg_; }
  const Shape& shape() const { return *shape_; }
  const GeometryGrid& grid() const { return grid_; }
  const MeshState& state() const { return state_; }
  const std::vector<double>& sizing() const { return mu_; }
  const std::vector<double>& density() const { return rho_; }
  const std::vector<VoronoiCell>& cells() const { return cells_; }
  Phase phase() const { return phase_; }
  long long iteration() const { return iteration_; }
  bool done() const { return done_; }
  const std::string& reason() const { return reason_; }

  // Procedure 1 on the current points: Voronoi cells, dual triangles and
  // the validity filter. Refreshes the snapshot.
  void triangulate();

 private:
  void write_iteration_mesh(const std::string& name) const;

  Config cfg_;
  Parallel par_;
  std::optional<Shape> shape_;
  GeometryGrid grid_;
  std::vector<double> mu_;
  std::vector<double> rho_;
  MeshState state_;
  std::vector<VoronoiCell> cells_;
  SpringSystem springs_;
  Phase phase_ = Phase::DistMesh;
  bool retria_ = false;
  bool initialized_ = false;
  bool done_ = false;
  long long iteration_ = 0;
  std::string reason_;
  std::vector<Segment> outline_;
};

RunReport run_pipeline(const Config& cfg, bool write_files = true);

}  // namespace trime
