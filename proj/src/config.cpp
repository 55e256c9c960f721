#include "trime/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "trime/error.hpp"

namespace trime {

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& s) {
  double v = 0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) parse_fail("expected a number, got '" + s + "'");
  return v;
}

template <typename Int>
Int to_int(const std::string& s) {
  Int v = 0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) parse_fail("expected an integer, got '" + s + "'");
  return v;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    if (ch == '(' || ch == ')' || ch == ',') {
      flush();
      out.emplace_back(1, ch);
    } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
      flush();
    } else {
      cur += ch;
    }
  }
  flush();
  return out;
}

struct TokenStream {
  std::vector<std::string> tokens;
  std::size_t pos = 0;

  bool done() const { return pos >= tokens.size(); }
  const std::string& next() {
    if (done()) parse_fail("unexpected end of expression");
    return tokens[pos++];
  }
  void expect(const std::string& t) {
    const std::string& got = next();
    if (got != t) parse_fail("expected '" + t + "', got '" + got + "'");
  }
};

ShapeSpec parse_shape(TokenStream& ts) {
  const std::string head = ts.next();
  ShapeSpec s;
  auto numbers = [&](int n) {
    for (int i = 0; i < n; ++i) s.numbers.push_back(to_double(ts.next()));
  };
  if (head == "circle") {
    s.kind = ShapeSpec::Kind::Circle;
    numbers(3);
  } else if (head == "rect") {
    s.kind = ShapeSpec::Kind::Rect;
    numbers(4);
  } else if (head == "contour") {
    s.kind = ShapeSpec::Kind::Contour;
    s.path = ts.next();
  } else if (head == "union" || head == "difference" || head == "intersection") {
    s.kind = head == "union"        ? ShapeSpec::Kind::Union
             : head == "difference" ? ShapeSpec::Kind::Difference
                                    : ShapeSpec::Kind::Intersection;
    ts.expect("(");
    s.left = std::make_shared<ShapeSpec>(parse_shape(ts));
    ts.expect(",");
    s.right = std::make_shared<ShapeSpec>(parse_shape(ts));
    ts.expect(")");
  } else {
    parse_fail("unknown shape '" + head + "'");
  }
  return s;
}

bool same_ptr(const std::shared_ptr<ShapeSpec>& a, const std::shared_ptr<ShapeSpec>& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

Algorithm parse_algorithm(const std::string& v) {
  if (v == "dm" || v == "distmesh") return Algorithm::DistMesh;
  if (v == "cvd") return Algorithm::Cvd;
  if (v == "hybrid") return Algorithm::Hybrid;
  parse_fail("unknown algorithm '" + v + "'");
}

Box parse_box(const std::string& v) {
  std::istringstream in(v);
  std::vector<double> n;
  std::string t;
  while (in >> t) n.push_back(to_double(t));
  if (n.size() != 4) parse_fail("domain needs 'x0 x1 y0 y1'");
  return {n[0], n[1], n[2], n[3]};
}

std::vector<Vec2> parse_points(const std::string& v) {
  std::istringstream in(v);
  std::vector<double> n;
  std::string t;
  while (in >> t) n.push_back(to_double(t));
  if (n.size() % 2 != 0) parse_fail("fixed_points needs x y pairs");
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < n.size(); i += 2) out.push_back({n[i], n[i + 1]});
  return out;
}

struct Field {
  std::function<void(Config&, const std::string&)> set;
  std::function<std::optional<std::string>(const Config&)> get;
};

template <typename T>
Field number_field(T Config::*m) {
  return {[m](Config& c, const std::string& v) {
            if constexpr (std::is_floating_point_v<T>) {
              c.*m = to_double(v);
            } else {
              c.*m = to_int<T>(v);
            }
          },
          [m](const Config& c) -> std::optional<std::string> {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*m);
            } else {
              return std::to_string(c.*m);
            }
          }};
}

// Ordered as printed.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"n_total", number_field(&Config::n_total)},
      {"algorithm",
       {[](Config& c, const std::string& v) { c.algorithm = parse_algorithm(v); },
        [](const Config& c) -> std::optional<std::string> { return algorithm_name(c.algorithm); }}},
      {"threads", number_field(&Config::threads)},
      {"seed", number_field(&Config::seed)},
      {"output_interval", number_field(&Config::output_interval)},
      {"output_dir",
       {[](Config& c, const std::string& v) { c.output_dir = v; },
        [](const Config& c) -> std::optional<std::string> { return c.output_dir; }}},
      {"shape",
       {[](Config& c, const std::string& v) { c.shape = parse_shape_spec(v); },
        [](const Config& c) -> std::optional<std::string> { return print_shape_spec(c.shape); }}},
      {"domain",
       {[](Config& c, const std::string& v) { c.domain = parse_box(v); },
        [](const Config& c) -> std::optional<std::string> {
          return format_double(c.domain.x0) + " " + format_double(c.domain.x1) + " " +
                 format_double(c.domain.y0) + " " + format_double(c.domain.y1);
        }}},
      {"sizing",
       {[](Config& c, const std::string& v) { c.sizing = parse_sizing_spec(v); },
        [](const Config& c) -> std::optional<std::string> { return print_sizing_spec(c.sizing); }}},
      {"fixed_points",
       {[](Config& c, const std::string& v) { c.fixed_points = parse_points(v); },
        [](const Config& c) -> std::optional<std::string> {
          if (c.fixed_points.empty()) return std::nullopt;
          std::string s;
          for (const Vec2& p : c.fixed_points) {
            if (!s.empty()) s += ' ';
            s += format_double(p.x) + " " + format_double(p.y);
          }
          return s;
        }}},
      {"max_iterations", number_field(&Config::max_iterations)},
      {"n_opt", number_field(&Config::n_opt)},
      {"fac_grid", number_field(&Config::fac_grid)},
      {"fac_s", number_field(&Config::fac_s)},
      {"n_grid", number_field(&Config::n_grid)},
      {"n_nei_thres", number_field(&Config::n_nei_thres)},
      {"fac_nei", number_field(&Config::fac_nei)},
      {"eta", number_field(&Config::eta)},
      {"fac_init",
       {[](Config& c, const std::string& v) {
          if (v == "auto") {
            c.fac_init.reset();
          } else {
            c.fac_init = to_double(v);
          }
        },
        [](const Config& c) -> std::optional<std::string> {
          return c.fac_init ? format_double(*c.fac_init) : std::string("auto");
        }}},
      {"t_add_quality", number_field(&Config::t_add_quality)},
      {"fac_add", number_field(&Config::fac_add)},
      {"fac_retria", number_field(&Config::fac_retria)},
      {"fac_end", number_field(&Config::fac_end)},
      {"fac_pt", number_field(&Config::fac_pt)},
      {"fac_geps", number_field(&Config::fac_geps)},
      {"t_depth_adf", number_field(&Config::t_depth_adf)},
      {"fac_etol_adf", number_field(&Config::fac_etol_adf)},
      {"t_end_quality", number_field(&Config::t_end_quality)},
      {"t_end_alpha_max", number_field(&Config::t_end_alpha_max)},
      {"fac_voro_bound", number_field(&Config::fac_voro_bound)},
      {"t_tria_ccircum", number_field(&Config::t_tria_ccircum)},
      {"t_switch_quality", number_field(&Config::t_switch_quality)},
      {"newton_damping", number_field(&Config::newton_damping)},
      {"t_newton_ct", number_field(&Config::t_newton_ct)},
      {"fac_f", number_field(&Config::fac_f)},
      {"spring_k", number_field(&Config::spring_k)},
      {"dt", number_field(&Config::dt)},
  };
  return f;
}

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ValidationError, msg); }

void validate_shape(const ShapeSpec& s) {
  switch (s.kind) {
    case ShapeSpec::Kind::Circle:
      if (s.numbers.size() != 3) invalid("circle needs cx cy r");
      if (!(s.numbers[2] > 0)) invalid("circle radius must be positive");
      break;
    case ShapeSpec::Kind::Rect:
      if (s.numbers.size() != 4) invalid("rect needs x0 x1 y0 y1");
      if (!(s.numbers[1] > s.numbers[0] && s.numbers[3] > s.numbers[2])) {
        invalid("rect needs x0 < x1 and y0 < y1");
      }
      break;
    case ShapeSpec::Kind::Contour:
      if (s.path.empty()) invalid("contour needs a path");
      break;
    default:
      if (!s.left || !s.right) invalid("boolean shape needs two operands");
      validate_shape(*s.left);
      validate_shape(*s.right);
  }
}

}  // namespace

bool ShapeSpec::operator==(const ShapeSpec& o) const {
  return kind == o.kind && numbers == o.numbers && path == o.path && same_ptr(left, o.left) &&
         same_ptr(right, o.right);
}

ShapeSpec parse_shape_spec(const std::string& text) {
  TokenStream ts{tokenize(text)};
  ShapeSpec s = parse_shape(ts);
  if (!ts.done()) parse_fail("trailing input after shape: '" + ts.tokens[ts.pos] + "'");
  return s;
}

std::string print_shape_spec(const ShapeSpec& s) {
  std::string out;
  switch (s.kind) {
    case ShapeSpec::Kind::Circle:
    case ShapeSpec::Kind::Rect:
      out = s.kind == ShapeSpec::Kind::Circle ? "circle" : "rect";
      for (double v : s.numbers) out += " " + format_double(v);
      return out;
    case ShapeSpec::Kind::Contour:
      return "contour " + s.path;
    case ShapeSpec::Kind::Union:
      out = "union";
      break;
    case ShapeSpec::Kind::Difference:
      out = "difference";
      break;
    case ShapeSpec::Kind::Intersection:
      out = "intersection";
      break;
  }
  return out + "(" + print_shape_spec(*s.left) + ", " + print_shape_spec(*s.right) + ")";
}

Shape build_shape(const ShapeSpec& s, const Box& domain, const std::filesystem::path& base_dir) {
  switch (s.kind) {
    case ShapeSpec::Kind::Circle:
      return Shape::circle({s.numbers[0], s.numbers[1]}, s.numbers[2]);
    case ShapeSpec::Kind::Rect:
      return Shape::rectangle({s.numbers[0], s.numbers[1], s.numbers[2], s.numbers[3]});
    case ShapeSpec::Kind::Contour: {
      std::filesystem::path p(s.path);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      return Shape::contour(Contour::from_file(p, domain));
    }
    case ShapeSpec::Kind::Union:
      return Shape::combine(BooleanOp::Union, build_shape(*s.left, domain, base_dir),
                            build_shape(*s.right, domain, base_dir));
    case ShapeSpec::Kind::Difference:
      return Shape::combine(BooleanOp::Difference, build_shape(*s.left, domain, base_dir),
                            build_shape(*s.right, domain, base_dir));
    case ShapeSpec::Kind::Intersection:
      return Shape::combine(BooleanOp::Intersection, build_shape(*s.left, domain, base_dir),
                            build_shape(*s.right, domain, base_dir));
  }
  throw Error(ErrorCode::InvalidArgument, "bad shape kind");
}

bool is_convex_primitive(const ShapeSpec& s) {
  return s.kind == ShapeSpec::Kind::Circle || s.kind == ShapeSpec::Kind::Rect;
}

bool SizingSpec::operator==(const SizingSpec& o) const {
  return kind == o.kind && k == o.k && a == o.a && b == o.b && same_ptr(shape, o.shape);
}

SizingSpec parse_sizing_spec(const std::string& text) {
  TokenStream ts{tokenize(text)};
  SizingSpec s;
  const std::string head = ts.next();
  if (head == "constant") {
    s.kind = SizingSpec::Kind::Constant;
  } else if (head == "auto") {
    s.kind = SizingSpec::Kind::Auto;
    const std::string t = ts.next();
    if (t.size() < 3 || (t[0] != 'K' && t[0] != 'k') || t[1] != '=') {
      parse_fail("expected 'K=<value>' after auto");
    }
    s.k = to_double(t.substr(2));
  } else if (head == "distance") {
    s.kind = SizingSpec::Kind::Distance;
    s.a = to_double(ts.next());
    s.b = to_double(ts.next());
    s.shape = std::make_shared<ShapeSpec>(parse_shape(ts));
  } else {
    parse_fail("unknown sizing '" + head + "'");
  }
  if (!ts.done()) parse_fail("trailing input after sizing: '" + ts.tokens[ts.pos] + "'");
  return s;
}

std::string print_sizing_spec(const SizingSpec& s) {
  switch (s.kind) {
    case SizingSpec::Kind::Constant:
      return "constant";
    case SizingSpec::Kind::Auto:
      return "auto K=" + format_double(s.k);
    case SizingSpec::Kind::Distance:
      return "distance " + format_double(s.a) + " " + format_double(s.b) + " " +
             print_shape_spec(*s.shape);
  }
  return "constant";
}

bool Config::operator==(const Config& o) const {
  return n_total == o.n_total && algorithm == o.algorithm && threads == o.threads &&
         seed == o.seed && output_interval == o.output_interval && output_dir == o.output_dir &&
         shape == o.shape && domain.x0 == o.domain.x0 && domain.x1 == o.domain.x1 &&
         domain.y0 == o.domain.y0 && domain.y1 == o.domain.y1 && sizing == o.sizing &&
         fixed_points.size() == o.fixed_points.size() &&
         std::equal(fixed_points.begin(), fixed_points.end(), o.fixed_points.begin(),
                    [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }) &&
         max_iterations == o.max_iterations && n_opt == o.n_opt && fac_grid == o.fac_grid &&
         fac_s == o.fac_s && n_grid == o.n_grid && n_nei_thres == o.n_nei_thres &&
         fac_nei == o.fac_nei && eta == o.eta && fac_init == o.fac_init &&
         t_add_quality == o.t_add_quality && fac_add == o.fac_add && fac_retria == o.fac_retria &&
         fac_end == o.fac_end && fac_pt == o.fac_pt && fac_geps == o.fac_geps &&
         t_depth_adf == o.t_depth_adf && fac_etol_adf == o.fac_etol_adf &&
         t_end_quality == o.t_end_quality && t_end_alpha_max == o.t_end_alpha_max &&
         fac_voro_bound == o.fac_voro_bound && t_tria_ccircum == o.t_tria_ccircum &&
         t_switch_quality == o.t_switch_quality && newton_damping == o.newton_damping &&
         t_newton_ct == o.t_newton_ct && fac_f == o.fac_f && spring_k == o.spring_k && dt == o.dt;
}

double Config::effective_fac_init() const {
  if (fac_init) return *fac_init;
  return is_convex_primitive(shape) && sizing.kind == SizingSpec::Kind::Constant ? 1.0 : 0.2;
}

void set_config_value(Config& cfg, const std::string& key, const std::string& value) {
  for (const auto& [name, field] : fields()) {
    if (name == key) {
      field.set(cfg, trim(value));
      return;
    }
  }
  parse_fail("unknown key '" + key + "'");
}

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      parse_fail("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ParseError) throw;
      parse_fail("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

Config parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Config cfg;
  try {
    cfg = parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
  cfg.base_dir = path.parent_path();
  return cfg;
}

std::string print_config(const Config& cfg) {
  std::string out;
  for (const auto& [name, field] : fields()) {
    const auto v = field.get(cfg);
    if (v) out += name + " = " + *v + "\n";
  }
  return out;
}

void validate_config(const Config& c) {
  if (c.n_total < 3) invalid("n_total must be at least 3");
  if (c.threads < 1) invalid("threads must be at least 1");
  if (c.output_interval < -1) invalid("output_interval must be -1, 0 or positive");
  if (c.max_iterations < 1) invalid("max_iterations must be positive");
  if (!c.domain.valid()) invalid("domain must satisfy x0 < x1 and y0 < y1");
  if (c.fac_grid < 1 || c.n_grid < 1 || c.t_depth_adf < 0 || c.t_newton_ct < 1 ||
      c.n_nei_thres < 0) {
    invalid("integer factors out of range");
  }
  const std::pair<const char*, double> positive[] = {
      {"n_opt", c.n_opt},           {"fac_s", c.fac_s},
      {"fac_nei", c.fac_nei},       {"eta", c.eta},
      {"t_add_quality", c.t_add_quality},
      {"fac_add", c.fac_add},       {"fac_retria", c.fac_retria},
      {"fac_end", c.fac_end},       {"fac_pt", c.fac_pt},
      {"fac_geps", c.fac_geps},     {"fac_etol_adf", c.fac_etol_adf},
      {"t_end_quality", c.t_end_quality},
      {"t_end_alpha_max", c.t_end_alpha_max},
      {"fac_voro_bound", c.fac_voro_bound},
      {"t_tria_ccircum", c.t_tria_ccircum},
      {"t_switch_quality", c.t_switch_quality},
      {"newton_damping", c.newton_damping},
      {"fac_f", c.fac_f},           {"spring_k", c.spring_k},
      {"dt", c.dt},
  };
  for (const auto& [name, v] : positive) {
    if (!(v > 0) || !std::isfinite(v)) invalid(std::string(name) + " must be positive");
  }
  if (c.newton_damping > 1) invalid("newton_damping must be in (0, 1]");
  if (c.fac_init && !(*c.fac_init > 0 && *c.fac_init <= 1)) invalid("fac_init must be in (0, 1]");
  validate_shape(c.shape);
  if (c.sizing.kind == SizingSpec::Kind::Auto && !(c.sizing.k >= 0)) invalid("K must be >= 0");
  if (c.sizing.kind == SizingSpec::Kind::Distance) {
    if (!(c.sizing.a > 0) || !(c.sizing.b >= 0)) invalid("distance sizing needs a > 0, b >= 0");
    validate_shape(*c.sizing.shape);
  }
  for (const Vec2& p : c.fixed_points) {
    if (!c.domain.contains(p)) invalid("fixed point outside the domain");
  }
}

}  // namespace trime
