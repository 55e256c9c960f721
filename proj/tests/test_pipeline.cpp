#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "trime/error.hpp"
#include "trime/pipeline.hpp"

using namespace trime;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("trime_pipe_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Config circle_config(Algorithm alg, long long n) {
  Config c = parse_config("shape = circle 0.5 0.5 0.3\n");
  c.algorithm = alg;
  c.n_total = n;
  return c;
}

}  // namespace

TEST_CASE("each algorithm meshes a disc") {
  for (Algorithm alg : {Algorithm::DistMesh, Algorithm::Cvd, Algorithm::Hybrid}) {
    CAPTURE(algorithm_name(alg));
    Mesher m(circle_config(alg, 500));
    const RunReport r = m.run(false);
    CHECK(m.state().size() == 500);
    CHECK(r.iterations > 0);
    CHECK(r.reason != "iteration_cap");
    CHECK(r.summary.count > 800);
    CHECK(r.summary.median_alpha < 1.1);
    CHECK(r.summary.max_alpha < 3);
    for (std::size_t i = 0; i < m.state().size(); ++i) {
      const Vec2 p = m.state().points[i];
      CHECK(dist(p, {0.5, 0.5}) <= 0.3 + 1e-4);
      if (m.state().category[i] == PointCategory::Boundary) {
        CHECK(std::abs(dist(p, {0.5, 0.5}) - 0.3) <= 1e-4);
      }
    }
  }
}

TEST_CASE("files written for each output interval") {
  const auto dir = scratch_dir("interval");
  for (long long interval : {0LL, -1LL, 5LL}) {
    Config c = circle_config(Algorithm::DistMesh, 300);
    c.output_interval = interval;
    c.output_dir = (dir / std::to_string(interval)).string();
    Mesher m(c);
    const RunReport r = m.run(true);
    const fs::path out(c.output_dir);
    CHECK(fs::exists(out / "mesh_final.txt"));
    CHECK(fs::exists(out / "mesh_final.svg"));
    CHECK(fs::exists(out / "stats.txt"));
    CHECK(fs::exists(out / "mesh_initial.txt") == (interval != 0));
    int iter_files = 0;
    for (const auto& e : fs::directory_iterator(out)) {
      iter_files += e.path().filename().string().rfind("mesh_iter_", 0) == 0;
    }
    CHECK(iter_files == (interval > 0 ? r.iterations / interval : 0));
    if (interval > 0) CHECK(fs::exists(out / "mesh_iter_5.txt"));

    const MeshData final_mesh = read_mesh(out / "mesh_final.txt");
    CHECK(final_mesh.points.size() == m.state().size());
    CHECK(final_mesh.triangles == m.state().triangles);
    const std::string stats = slurp(out / "stats.txt");
    CHECK(stats.find("algorithm dm") != std::string::npos);
    CHECK(stats.find("termination " + r.reason) != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("runs are deterministic and thread independent") {
  const auto dir = scratch_dir("det");
  for (Algorithm alg : {Algorithm::DistMesh, Algorithm::Hybrid}) {
    std::vector<std::string> meshes;
    for (int threads : {1, 1, 4}) {
      Config c = parse_config("shape = difference(rect 0 1 0 1, circle 0.5 0.5 0.2)\n"
                              "domain = -0.1 1.1 -0.1 1.1\nsizing = auto K=0.2\n");
      c.algorithm = alg;
      c.n_total = 1500;
      c.threads = threads;
      c.output_dir = (dir / (std::string(algorithm_name(alg)) + std::to_string(meshes.size()))).string();
      Mesher(c).run(true);
      meshes.push_back(slurp(fs::path(c.output_dir) / "mesh_final.txt") +
                       slurp(fs::path(c.output_dir) / "stats.txt"));
    }
    CHECK(meshes[0] == meshes[1]);
    CHECK(meshes[0] == meshes[2]);
  }
  // A different seed gives a different mesh.
  Config a = circle_config(Algorithm::DistMesh, 300);
  Config b = a;
  b.seed = 2;
  Mesher ma(a), mb(b);
  ma.run(false);
  mb.run(false);
  CHECK(ma.state().points != mb.state().points);
  fs::remove_all(dir);
}

TEST_CASE("hybrid switches once the point count is reached and stays") {
  Config c = parse_config("shape = difference(rect 0 1 0 1, circle 0.5 0.5 0.2)\n"
                          "domain = -0.1 1.1 -0.1 1.1\n");
  c.algorithm = Algorithm::Hybrid;
  c.n_total = 1200;
  Mesher m(c);
  m.initialize();
  CHECK(m.state().size() == 240);  // fac_init 0.2 for a boolean shape
  bool seen_cvd = false;
  long long switched_at = -1;
  while (!m.step()) {
    if (m.phase() == Phase::Cvd) {
      if (!seen_cvd) {
        switched_at = m.iteration();
        CHECK(m.state().n_current == c.n_total);
      }
      seen_cvd = true;
    } else {
      CHECK(!seen_cvd);
    }
  }
  CHECK(seen_cvd);
  CHECK(switched_at > 1);
  CHECK(m.state().size() == 1200);
}

TEST_CASE("contour shape with automatic sizing") {
  const auto dir = scratch_dir("contour");
  {
    // L-shaped outline, clockwise.
    std::ofstream f(dir / "ell.txt");
    f << "# L shape\n";
    const double v[][2] = {{0.1, 0.1}, {0.1, 0.9}, {0.5, 0.9}, {0.5, 0.5}, {0.9, 0.5}, {0.9, 0.1}};
    for (int k = 0; k < 6; ++k) {
      f << v[k][0] << ' ' << v[k][1] << ' ' << v[(k + 1) % 6][0] << ' ' << v[(k + 1) % 6][1] << '\n';
    }
    std::ofstream(dir / "run.cfg") << "shape = contour ell.txt\nsizing = auto K=0.2\n"
                                      "n_total = 1200\nalgorithm = dm\n"
                                      "fixed_points = 0.1 0.1 0.1 0.9 0.5 0.9 0.5 0.5 0.9 0.5 0.9 0.1\n";
  }
  Config c = parse_config_file(dir / "run.cfg");
  c.output_dir = (dir / "out").string();
  Mesher m(c);
  const RunReport r = m.run(true);
  CHECK(m.state().size() == 1200);
  CHECK(r.summary.max_alpha < 5);
  CHECK(r.summary.median_alpha < 1.1);
  // Sizing shrinks towards a convex corner, where the medial axis ends.
  const auto& g = m.grid();
  CHECK(m.sizing()[g.cell_of({0.12, 0.12})] < m.sizing()[g.cell_of({0.3, 0.7})]);
  // The corners stay put.
  std::vector<Vec2> fixed;
  for (std::size_t i = 0; i < m.state().size(); ++i) {
    if (m.state().frozen[i]) fixed.push_back(m.state().points[i]);
  }
  CHECK(fixed == c.fixed_points);
  for (const Vec2& p : m.state().points) CHECK(m.shape().sdf(p) <= 1e-4);
  fs::remove_all(dir);
}

TEST_CASE("iteration cap and errors") {
  Config c = circle_config(Algorithm::Cvd, 400);
  c.max_iterations = 3;
  Mesher m(c);
  const RunReport r = m.run(false);
  CHECK(r.iterations == 3);
  CHECK(r.reason == "iteration_cap");

  Config bad = circle_config(Algorithm::DistMesh, 100);
  bad.fac_geps = -1;
  try {
    Mesher x(bad);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
  }

  Config missing = parse_config("shape = contour /nonexistent/trime.txt\n");
  Mesher y(missing);
  try {
    y.initialize();
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}
