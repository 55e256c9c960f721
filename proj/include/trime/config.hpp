#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trime/mesh_algorithms.hpp"
#include "trime/shape.hpp"
#include "trime/vec2.hpp"

namespace trime {

// Parsed shape expression. Kept as a tree so it can be printed back.
struct ShapeSpec {
  enum class Kind { Circle, Rect, Contour, Union, Difference, Intersection };
  Kind kind = Kind::Rect;
  std::vector<double> numbers;  // circle: cx cy r, rect: x0 x1 y0 y1
  std::string path;             // contour file as written
  std::shared_ptr<ShapeSpec> left;
  std::shared_ptr<ShapeSpec> right;

  bool operator==(const ShapeSpec& o) const;

  static ShapeSpec rect(double x0, double x1, double y0, double y1) {
    ShapeSpec s;
    s.numbers = {x0, x1, y0, y1};
    return s;
  }
};

ShapeSpec parse_shape_spec(const std::string& text);
std::string print_shape_spec(const ShapeSpec& s);
// Relative contour paths are resolved against base_dir.
Shape build_shape(const ShapeSpec& s, const Box& domain, const std::filesystem::path& base_dir);
bool is_convex_primitive(const ShapeSpec& s);

struct SizingSpec {
  enum class Kind { Constant, Auto, Distance };
  Kind kind = Kind::Constant;
  double k = 0;       // auto
  double a = 0;       // distance: mu = a + b * max(sdf_shape, 0)
  double b = 0;
  std::shared_ptr<ShapeSpec> shape;

  bool operator==(const SizingSpec& o) const;
};

SizingSpec parse_sizing_spec(const std::string& text);
std::string print_sizing_spec(const SizingSpec& s);

struct Config {
  long long n_total = 1000;
  Algorithm algorithm = Algorithm::DistMesh;
  int threads = 1;
  std::uint64_t seed = 1;
  long long output_interval = 0;
  std::string output_dir = "out";
  ShapeSpec shape = ShapeSpec::rect(0, 1, 0, 1);  // the default domain
  Box domain{0, 1, 0, 1};
  SizingSpec sizing;
  std::vector<Vec2> fixed_points;
  long long max_iterations = 10000;

  double n_opt = 3.3;
  int fac_grid = 5;
  double fac_s = 0.5;
  int n_grid = 5;
  int n_nei_thres = 3;
  double fac_nei = 2.0;
  double eta = 0.5;
  std::optional<double> fac_init;
  double t_add_quality = 0.002;
  double fac_add = 0.6;
  double fac_retria = 0.1;
  double fac_end = 0.001;
  double fac_pt = 0.4;
  double fac_geps = 0.01;
  int t_depth_adf = 10;
  double fac_etol_adf = 0.1;
  double t_end_quality = 0.001;
  double t_end_alpha_max = 0.005;
  double fac_voro_bound = 5.0;
  double t_tria_ccircum = 0.4;
  double t_switch_quality = 0.0015;
  double newton_damping = 1.0;
  int t_newton_ct = 10;
  double fac_f = 1.2;
  double spring_k = 1.0;
  double dt = 0.2;

  // Directory used to resolve relative contour paths; not printed.
  std::filesystem::path base_dir;

  bool operator==(const Config& o) const;

  // 1.0 for a convex primitive with constant sizing, else 0.2, unless set.
  double effective_fac_init() const;
};

// key = value lines, '#' starts a comment. Throws ParseError (with line
// number) or ValidationError.
Config parse_config(const std::string& text);
Config parse_config_file(const std::filesystem::path& path);
// Applies one key = value pair, as from a command line override.
void set_config_value(Config& cfg, const std::string& key, const std::string& value);
std::string print_config(const Config& cfg);
void validate_config(const Config& cfg);

// Shortest round-trip decimal.
std::string format_double(double v);

}  // namespace trime
