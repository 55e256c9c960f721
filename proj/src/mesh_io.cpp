#include "trime/mesh_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "trime/config.hpp"
#include "trime/error.hpp"

namespace trime {

std::string format_mesh(std::span<const Vec2> points, std::span<const PointCategory> category,
                        std::span<const Tri> tris) {
  std::string out;
  out.reserve(points.size() * 48 + tris.size() * 24);
  out += std::to_string(points.size()) + " " + std::to_string(tris.size()) + "\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out += format_double(points[i].x);
    out += ' ';
    out += format_double(points[i].y);
    out += ' ';
    out += category_name(category[i]);
    out += '\n';
  }
  for (const Tri& t : tris) {
    out += std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_mesh(const std::filesystem::path& path, std::span<const Vec2> points,
                std::span<const PointCategory> category, std::span<const Tri> tris) {
  write_text(path, format_mesh(points, category, tris));
}

MeshData read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open mesh file " + path.string());
  auto bad = [&] { return Error(ErrorCode::ParseError, "malformed mesh file " + path.string()); };
  std::size_t np = 0, nt = 0;
  if (!(in >> np >> nt)) throw bad();
  MeshData m;
  m.points.resize(np);
  m.category.resize(np);
  for (std::size_t i = 0; i < np; ++i) {
    std::string x, y, cat;
    if (!(in >> x >> y >> cat)) throw bad();
    m.points[i] = {std::strtod(x.c_str(), nullptr), std::strtod(y.c_str(), nullptr)};
    if (cat == "inner") {
      m.category[i] = PointCategory::Inner;
    } else if (cat == "boundary") {
      m.category[i] = PointCategory::Boundary;
    } else {
      throw bad();
    }
  }
  m.triangles.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    if (!(in >> m.triangles[t][0] >> m.triangles[t][1] >> m.triangles[t][2])) throw bad();
    for (std::uint32_t v : m.triangles[t]) {
      if (v >= np) throw bad();
    }
  }
  return m;
}

std::string format_svg(std::span<const Vec2> points, std::span<const Tri> tris, const Box& box,
                       std::span<const Segment> segments) {
  const double scale = 1000.0 / std::max(box.width(), box.height());
  const double w = box.width() * scale;
  const double h = box.height() * scale;
  auto X = [&](Vec2 p) { return format_double((p.x - box.x0) * scale); };
  auto Y = [&](Vec2 p) { return format_double((box.y1 - p.y) * scale); };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(w)
      << "\" height=\"" << format_double(h) << "\" viewBox=\"0 0 " << format_double(w) << ' '
      << format_double(h) << "\">\n";
  out << "<g fill=\"none\" stroke=\"black\" stroke-width=\"0.3\">\n";
  for (const Tri& t : tris) {
    out << "<polygon points=\"";
    for (int k = 0; k < 3; ++k) {
      const Vec2 p = points[t[k]];
      out << (k ? " " : "") << X(p) << ',' << Y(p);
    }
    out << "\"/>\n";
  }
  out << "</g>\n";
  if (!segments.empty()) {
    out << "<g fill=\"none\" stroke=\"red\" stroke-width=\"0.8\">\n";
    for (const Segment& s : segments) {
      out << "<line x1=\"" << X(s.p1) << "\" y1=\"" << Y(s.p1) << "\" x2=\"" << X(s.p2)
          << "\" y2=\"" << Y(s.p2) << "\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_svg(const std::filesystem::path& path, std::span<const Vec2> points,
               std::span<const Tri> tris, const Box& box, std::span<const Segment> segments) {
  write_text(path, format_svg(points, tris, box, segments));
}

namespace {

void describe(std::vector<double>& v, double& median, double& mean, double& max, double& stdev) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  double s = 0;
  for (double x : v) s += x;
  mean = s / static_cast<double>(n);
  max = v.back();
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  stdev = std::sqrt(ss / static_cast<double>(n));
}

}  // namespace

SummaryStats summary_stats(std::span<const Vec2> points, std::span<const Tri> tris) {
  SummaryStats s;
  s.count = tris.size();
  if (tris.empty()) return s;
  std::vector<double> alpha, beta;
  alpha.reserve(tris.size());
  beta.reserve(tris.size());
  std::size_t below_12 = 0, below_2 = 0;
  for (const Tri& t : tris) {
    const Vec2 a = points[t[0]], b = points[t[1]], c = points[t[2]];
    double al = std::numeric_limits<double>::infinity();
    double be = al;
    if (0.5 * std::abs(cross(b - a, c - a)) > 1e-300) {
      const TriangleQuality q = triangle_quality(a, b, c);
      al = q.alpha;
      be = q.beta;
    }
    alpha.push_back(al);
    beta.push_back(be);
    below_12 += al < 1.2;
    below_2 += al < 2.0;
  }
  describe(alpha, s.median_alpha, s.mean_alpha, s.max_alpha, s.stdev_alpha);
  describe(beta, s.median_beta, s.mean_beta, s.max_beta, s.stdev_beta);
  s.pct_alpha_below_1_2 = 100.0 * static_cast<double>(below_12) / static_cast<double>(s.count);
  s.pct_alpha_below_2 = 100.0 * static_cast<double>(below_2) / static_cast<double>(s.count);
  return s;
}

std::string format_stats(std::span<const QualityRecord> history, const SummaryStats& s,
                         const RunInfo& info) {
  std::ostringstream out;
  out << "algorithm " << info.algorithm << "\n";
  out << "iterations " << info.iterations << "\n";
  out << "termination " << info.reason << "\n";
  out << "points " << info.n_points << "\n";
  out << "\niteration half_mean_alpha half_mean_beta max_alpha triangles\n";
  for (std::size_t k = 0; k < history.size(); ++k) {
    const QualityRecord& r = history[k];
    out << k << ' ' << format_double(r.half_alpha) << ' ' << format_double(r.half_beta) << ' '
        << format_double(r.max_alpha) << ' ' << r.triangles << "\n";
  }
  out << "\nsummary\n";
  out << "count " << s.count << "\n";
  out << "median_alpha " << format_double(s.median_alpha) << "\n";
  out << "mean_alpha " << format_double(s.mean_alpha) << "\n";
  out << "max_alpha " << format_double(s.max_alpha) << "\n";
  out << "stdev_alpha " << format_double(s.stdev_alpha) << "\n";
  out << "median_beta " << format_double(s.median_beta) << "\n";
  out << "mean_beta " << format_double(s.mean_beta) << "\n";
  out << "max_beta " << format_double(s.max_beta) << "\n";
  out << "stdev_beta " << format_double(s.stdev_beta) << "\n";
  out << "pct_alpha_below_1.2 " << format_double(s.pct_alpha_below_1_2) << "\n";
  out << "pct_alpha_below_2 " << format_double(s.pct_alpha_below_2) << "\n";
  return out.str();
}

}  // namespace trime
