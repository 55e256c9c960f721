#include "trime/shape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "trime/error.hpp"

namespace trime {

Segment Segment::from_points(Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len = norm(d);
  Segment s{a, b, {0.0, 0.0}};
  if (len > 0) s.inward_normal = Vec2{d.y, -d.x} / len;
  return s;
}

SegmentHit closest_on_segment(Vec2 p, const Segment& s) {
  const Vec2 d = s.p2 - s.p1;
  const double len2 = norm2(d);
  double t = 0.0;
  if (len2 > 0) t = std::clamp(dot(p - s.p1, d) / len2, 0.0, 1.0);
  Vec2 q;
  if (t <= 0.0) {
    q = s.p1;
  } else if (t >= 1.0) {
    q = s.p2;
  } else {
    q = s.p1 + d * t;
  }
  return {q, dist(p, q), t};
}

namespace {

// Liang-Barsky style test: does the closed segment touch the closed box?
bool segment_touches_box(const Segment& s, double x0, double x1, double y0, double y1) {
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec2 d = s.p2 - s.p1;
  auto clip = [&](double p, double q) {
    if (p == 0.0) return q >= 0.0;
    const double r = q / p;
    if (p < 0) {
      if (r > t1) return false;
      t0 = std::max(t0, r);
    } else {
      if (r < t0) return false;
      t1 = std::min(t1, r);
    }
    return true;
  };
  return clip(-d.x, s.p1.x - x0) && clip(d.x, x1 - s.p1.x) && clip(-d.y, s.p1.y - y0) &&
         clip(d.y, y1 - s.p1.y);
}

}  // namespace

SegmentGrid::SegmentGrid(std::span<const Segment> segments, Box box) : box_(box) {
  double total = 0;
  for (const Segment& s : segments) total += s.length();
  const double mean = segments.empty() ? box.diagonal() : total / segments.size();
  constexpr double kMaxBins = 2048;
  nx_ = static_cast<int>(std::clamp(std::ceil(box.width() / mean), 1.0, kMaxBins));
  ny_ = static_cast<int>(std::clamp(std::ceil(box.height() / mean), 1.0, kMaxBins));
  dx_ = box.width() / nx_;
  dy_ = box.height() / ny_;

  const std::size_t cells = static_cast<std::size_t>(nx_) * ny_;
  const double pad = 1e-12 * box.diagonal();
  std::vector<std::uint32_t> counts(cells + 1, 0);
  auto for_touched = [&](const Segment& s, auto&& emit) {
    const int i0 = column_of(std::min(s.p1.x, s.p2.x) - pad);
    const int i1 = column_of(std::max(s.p1.x, s.p2.x) + pad);
    const int j0 = row_of(std::min(s.p1.y, s.p2.y) - pad);
    const int j1 = row_of(std::max(s.p1.y, s.p2.y) + pad);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const double cx0 = box_.x0 + i * dx_ - pad;
        const double cy0 = box_.y0 + j * dy_ - pad;
        if (segment_touches_box(s, cx0, cx0 + dx_ + 2 * pad, cy0, cy0 + dy_ + 2 * pad)) {
          emit(static_cast<std::size_t>(j) * nx_ + i);
        }
      }
    }
  };
  for (const Segment& s : segments) for_touched(s, [&](std::size_t c) { ++counts[c + 1]; });
  offsets_.assign(cells + 1, 0);
  std::partial_sum(counts.begin(), counts.end(), offsets_.begin());
  items_.assign(offsets_.back(), 0);
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t k = 0; k < segments.size(); ++k) {
    for_touched(segments[k], [&](std::size_t c) { items_[fill[c]++] = k; });
  }
}

int SegmentGrid::column_of(double x) const {
  const double f = std::floor((x - box_.x0) / dx_);
  return static_cast<int>(std::clamp(f, 0.0, static_cast<double>(nx_ - 1)));
}

int SegmentGrid::row_of(double y) const {
  const double f = std::floor((y - box_.y0) / dy_);
  return static_cast<int>(std::clamp(f, 0.0, static_cast<double>(ny_ - 1)));
}

Contour::Contour(std::vector<Segment> segments, Box domain) : segments_(std::move(segments)) {
  if (segments_.empty()) throw Error(ErrorCode::EmptyContour, "contour has no segments");
  const std::size_t n = segments_.size();
  Box bounds{segments_[0].p1.x, segments_[0].p1.x, segments_[0].p1.y, segments_[0].p1.y};
  for (const Segment& s : segments_) {
    for (Vec2 p : {s.p1, s.p2}) {
      bounds.x0 = std::min(bounds.x0, p.x);
      bounds.x1 = std::max(bounds.x1, p.x);
      bounds.y0 = std::min(bounds.y0, p.y);
      bounds.y1 = std::max(bounds.y1, p.y);
    }
  }
  Box box{std::min(domain.x0, bounds.x0), std::max(domain.x1, bounds.x1),
          std::min(domain.y0, bounds.y0), std::max(domain.y1, bounds.y1)};
  const double tol = 1e-12 * box.diagonal();

  // Link each segment to the one starting where it ends.
  std::vector<std::uint32_t> by_x(n);
  std::iota(by_x.begin(), by_x.end(), 0u);
  std::sort(by_x.begin(), by_x.end(), [&](std::uint32_t a, std::uint32_t b) {
    return segments_[a].p1.x < segments_[b].p1.x || (segments_[a].p1.x == segments_[b].p1.x && a < b);
  });
  std::vector<char> claimed(n, 0);
  next_.assign(n, 0);
  prev_.assign(n, 0);
  for (std::uint32_t k = 0; k < n; ++k) {
    const Vec2 end = segments_[k].p2;
    auto it = std::lower_bound(by_x.begin(), by_x.end(), end.x - tol, [&](std::uint32_t a, double x) {
      return segments_[a].p1.x < x;
    });
    bool linked = false;
    for (; it != by_x.end() && segments_[*it].p1.x <= end.x + tol; ++it) {
      if (claimed[*it] || std::abs(segments_[*it].p1.y - end.y) > tol) continue;
      claimed[*it] = 1;
      next_[k] = *it;
      prev_[*it] = k;
      linked = true;
      break;
    }
    if (!linked) {
      throw Error(ErrorCode::InvalidContour,
                  "contour segment " + std::to_string(k) + " does not connect to a successor");
    }
  }
  double area2 = 0;
  double total = 0;
  for (std::uint32_t k = 0; k < n; ++k) {
    segments_[next_[k]].p1 = segments_[k].p2;
  }
  for (Segment& s : segments_) {
    if (!(s.length() > 0)) throw Error(ErrorCode::InvalidContour, "contour has a zero-length segment");
    s = Segment::from_points(s.p1, s.p2);
    area2 += cross(s.p1, s.p2);
    total += s.length();
  }
  if (!(area2 < 0)) {
    throw Error(ErrorCode::InvalidContour, "contour must be oriented clockwise");
  }
  mean_length_ = total / n;
  grid_ = SegmentGrid(segments_, box);
}

Contour Contour::from_file(const std::filesystem::path& path, Box domain) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open contour file " + path.string());
  std::vector<Segment> segs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double x1, y1, x2, y2;
    if (!(ls >> x1 >> y1 >> x2 >> y2)) {
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(line_no) + ": expected 'x1 y1 x2 y2'");
    }
    segs.push_back(Segment::from_points({x1, y1}, {x2, y2}));
  }
  return Contour(std::move(segs), domain);
}

Vec2 Contour::normal_at(std::uint32_t s, double t) const {
  const Vec2 own = segments_[s].inward_normal;
  Vec2 other;
  if (t <= 0.0) {
    other = segments_[prev_[s]].inward_normal;
  } else if (t >= 1.0) {
    other = segments_[next_[s]].inward_normal;
  } else {
    return own;
  }
  const Vec2 avg = own + other;
  const double len = norm(avg);
  return len > 1e-300 ? avg / len : own;
}

ContourHit Contour::query(Vec2 p) const {
  const int ci = grid_.column_of(p.x);
  const int cj = grid_.row_of(p.y);
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_seg = 0;
  SegmentHit best_hit;
  auto consider = [&](std::span<const std::uint32_t> bin) {
    for (std::uint32_t k : bin) {
      const SegmentHit h = closest_on_segment(p, segments_[k]);
      if (h.dist < best || (h.dist == best && k < best_seg)) {
        best = h.dist;
        best_seg = k;
        best_hit = h;
      }
    }
  };

  // Rings of bins around p's bin until one holds a segment.
  const int max_layer = std::max(grid_.nx(), grid_.ny());
  bool found = false;
  for (int layer = 0; layer <= max_layer && !found; ++layer) {
    for (int j = cj - layer; j <= cj + layer; ++j) {
      if (j < 0 || j >= grid_.ny()) continue;
      const bool edge_row = (j == cj - layer || j == cj + layer);
      for (int i = ci - layer; i <= ci + layer; i += (edge_row ? 1 : 2 * std::max(layer, 1))) {
        if (i < 0 || i >= grid_.nx()) continue;
        const auto bin = grid_.bin(i, j);
        if (!bin.empty()) found = true;
        consider(bin);
      }
    }
  }
  if (!found) throw Error(ErrorCode::EmptyContour, "no contour segment found");

  // Any closer segment must touch the disc of radius `best` around p.
  const double r = best;
  const int i0 = grid_.column_of(p.x - r);
  const int i1 = grid_.column_of(p.x + r);
  const int j0 = grid_.row_of(p.y - r);
  const int j1 = grid_.row_of(p.y + r);
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) consider(grid_.bin(i, j));
  }

  ContourHit hit;
  hit.q = best_hit.q;
  hit.segment = best_seg;
  hit.normal = normal_at(best_seg, best_hit.t);
  hit.sdf = dot(p - hit.q, hit.normal) > 0 ? -best : best;
  return hit;
}

double circle_sdf(Vec2 center, double radius, Vec2 p) { return dist(p, center) - radius; }

double rectangle_sdf(const Box& rect, Vec2 p) {
  const Vec2 c{0.5 * (rect.x0 + rect.x1), 0.5 * (rect.y0 + rect.y1)};
  const double dx = std::abs(p.x - c.x) - 0.5 * rect.width();
  const double dy = std::abs(p.y - c.y) - 0.5 * rect.height();
  const double outside = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  const double inside = std::min(std::max(dx, dy), 0.0);
  return outside + inside;
}

double boolean_sdf(BooleanOp op, double a, double b) {
  switch (op) {
    case BooleanOp::Union:
      return std::min(a, b);
    case BooleanOp::Difference:
      return std::max(a, -b);
    case BooleanOp::Intersection:
      return std::max(a, b);
  }
  return a;
}

Shape Shape::circle(Vec2 center, double radius) { return Shape(Circle{center, radius}); }
Shape Shape::rectangle(Box bounds) { return Shape(Rectangle{bounds}); }
Shape Shape::contour(Contour c) { return Shape(std::make_shared<const Contour>(std::move(c))); }
Shape Shape::combine(BooleanOp op, Shape left, Shape right) {
  return Shape(Combined{op, std::make_shared<const Shape>(std::move(left)),
                        std::make_shared<const Shape>(std::move(right))});
}
Shape Shape::function(std::function<double(Vec2)> fn) { return Shape(UserFunction{std::move(fn)}); }

double Shape::sdf(Vec2 p) const {
  struct Visitor {
    Vec2 p;
    double operator()(const Circle& c) const { return circle_sdf(c.center, c.radius, p); }
    double operator()(const Rectangle& r) const { return rectangle_sdf(r.bounds, p); }
    double operator()(const std::shared_ptr<const Contour>& c) const { return c->query(p).sdf; }
    double operator()(const Combined& c) const {
      return boolean_sdf(c.op, c.left->sdf(p), c.right->sdf(p));
    }
    double operator()(const UserFunction& f) const { return f.fn(p); }
  };
  return std::visit(Visitor{p}, v_);
}

Vec2 Shape::gradient(Vec2 p, double step) const {
  const double gx = (sdf({p.x + step, p.y}) - sdf({p.x - step, p.y})) / (2 * step);
  const double gy = (sdf({p.x, p.y + step}) - sdf({p.x, p.y - step})) / (2 * step);
  return {gx, gy};
}

const Contour* Shape::as_contour() const {
  if (const auto* c = std::get_if<std::shared_ptr<const Contour>>(&v_)) return c->get();
  return nullptr;
}

void Shape::collect_segments(std::vector<Segment>& out) const {
  if (const Contour* c = as_contour()) {
    out.insert(out.end(), c->segments().begin(), c->segments().end());
  } else if (const auto* comb = std::get_if<Combined>(&v_)) {
    comb->left->collect_segments(out);
    comb->right->collect_segments(out);
  }
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyContour: return "EmptyContour";
    case ErrorCode::InvalidContour: return "InvalidContour";
    case ErrorCode::DegenerateDomain: return "DegenerateDomain";
    case ErrorCode::ZeroDensityCell: return "ZeroDensityCell";
    case ErrorCode::NotBoundaryCell: return "NotBoundaryCell";
    case ErrorCode::ProjectionStarvation: return "ProjectionStarvation";
    case ErrorCode::EmptyMedialAxis: return "EmptyMedialAxis";
    case ErrorCode::DegenerateLfs: return "DegenerateLfs";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::EmptyTriangulation: return "EmptyTriangulation";
    case ErrorCode::DegenerateCell: return "DegenerateCell";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidState: return "InvalidState";
  }
  return "Unknown";
}

}  // namespace trime
