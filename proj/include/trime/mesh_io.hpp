#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "trime/geometry_grid.hpp"
#include "trime/point_manager.hpp"
#include "trime/shape.hpp"
#include "trime/voronoi.hpp"

namespace trime {

struct MeshData {
  std::vector<Vec2> points;
  std::vector<PointCategory> category;
  std::vector<Tri> triangles;
};

// "N_points N_triangles", then "x y category" per point, then "i j k" per
// triangle. Coordinates use shortest round-trip decimals.
std::string format_mesh(std::span<const Vec2> points, std::span<const PointCategory> category,
                        std::span<const Tri> tris);
void write_mesh(const std::filesystem::path& path, std::span<const Vec2> points,
                std::span<const PointCategory> category, std::span<const Tri> tris);
MeshData read_mesh(const std::filesystem::path& path);

// Stroke-only triangles; segments (if any) are drawn on top.
std::string format_svg(std::span<const Vec2> points, std::span<const Tri> tris, const Box& box,
                       std::span<const Segment> segments = {});
void write_svg(const std::filesystem::path& path, std::span<const Vec2> points,
               std::span<const Tri> tris, const Box& box, std::span<const Segment> segments = {});

struct SummaryStats {
  std::size_t count = 0;
  double median_alpha = 0, mean_alpha = 0, max_alpha = 0, stdev_alpha = 0;
  double median_beta = 0, mean_beta = 0, max_beta = 0, stdev_beta = 0;
  double pct_alpha_below_1_2 = 0;
  double pct_alpha_below_2 = 0;
};

SummaryStats summary_stats(std::span<const Vec2> points, std::span<const Tri> tris);

struct RunInfo {
  std::string algorithm;
  long long iterations = 0;
  std::string reason;
  long long n_points = 0;
};

std::string format_stats(std::span<const QualityRecord> history, const SummaryStats& s,
                         const RunInfo& info);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace trime
