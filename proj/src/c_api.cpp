#include "trime/trime.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "trime/config.hpp"
#include "trime/error.hpp"
#include "trime/pipeline.hpp"

struct trime_config {
  trime::Config cfg;
};

struct trime_mesher {
  trime::Mesher mesher;
};

struct trime_shape {
  trime::Shape shape;
};

namespace {

thread_local std::string g_last_error;

trime_status fail(trime_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename Fn>
trime_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const trime::Error& e) {
    return fail(static_cast<trime_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(TRIME_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TRIME_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TRIME_ERR_INTERNAL, "unknown failure");
  }
}

trime_status null_arg(const char* what) {
  return fail(TRIME_ERR_INVALID_ARGUMENT, std::string(what) + " is null");
}

trime_status copy_string(const std::string& s, char* buf, size_t size, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || size < s.size() + 1) {
    return fail(TRIME_ERR_BUFFER_TOO_SMALL, "buffer too small");
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return TRIME_OK;
}

}  // namespace

extern "C" {

const char* trime_version(void) { return "1.0.0"; }

const char* trime_status_name(trime_status status) {
  switch (status) {
    case TRIME_OK:
      return "ok";
    case TRIME_ERR_BUFFER_TOO_SMALL:
      return "BufferTooSmall";
    case TRIME_ERR_INTERNAL:
      return "Internal";
    default:
      if (status >= 1 && status <= 19) {
        return trime::error_code_name(static_cast<trime::ErrorCode>(status));
      }
      return "Unknown";
  }
}

const char* trime_last_error(void) { return g_last_error.c_str(); }

trime_status trime_config_create(trime_config** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new trime_config{};
    return TRIME_OK;
  });
}

trime_status trime_config_parse(const char* text, trime_config** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new trime_config{trime::parse_config(text)};
    return TRIME_OK;
  });
}

trime_status trime_config_load(const char* path, trime_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new trime_config{trime::parse_config_file(path)};
    return TRIME_OK;
  });
}

trime_status trime_config_set(trime_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  if (!value) return null_arg("value");
  return guarded([&] {
    trime::Config copy = cfg->cfg;
    trime::set_config_value(copy, key, value);
    cfg->cfg = std::move(copy);
    return TRIME_OK;
  });
}

trime_status trime_config_print(const trime_config* cfg, char* buf, size_t size, size_t* needed) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] { return copy_string(trime::print_config(cfg->cfg), buf, size, needed); });
}

trime_status trime_config_validate(const trime_config* cfg) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] {
    trime::validate_config(cfg->cfg);
    return TRIME_OK;
  });
}

void trime_config_destroy(trime_config* cfg) { delete cfg; }

trime_status trime_mesher_create(const trime_config* cfg, trime_mesher** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new trime_mesher{trime::Mesher(cfg->cfg)};
    return TRIME_OK;
  });
}

trime_status trime_mesher_initialize(trime_mesher* m) {
  if (!m) return null_arg("mesher");
  return guarded([&] {
    m->mesher.initialize();
    return TRIME_OK;
  });
}

trime_status trime_mesher_step(trime_mesher* m, int* done) {
  if (!m) return null_arg("mesher");
  return guarded([&] {
    const bool d = m->mesher.step();
    if (done) *done = d ? 1 : 0;
    return TRIME_OK;
  });
}

trime_status trime_mesher_run(trime_mesher* m, int write_files) {
  if (!m) return null_arg("mesher");
  return guarded([&] {
    m->mesher.run(write_files != 0);
    return TRIME_OK;
  });
}

trime_status trime_mesher_finalize(trime_mesher* m, int write_files) {
  if (!m) return null_arg("mesher");
  return guarded([&] {
    if (m->mesher.state().points.empty()) {
      return fail(TRIME_ERR_INVALID_STATE, "mesher is not initialized");
    }
    m->mesher.finalize(write_files != 0);
    return TRIME_OK;
  });
}

trime_status trime_mesher_point_count(const trime_mesher* m, size_t* n) {
  if (!m) return null_arg("mesher");
  if (!n) return null_arg("n");
  *n = m->mesher.state().size();
  return TRIME_OK;
}

trime_status trime_mesher_triangle_count(const trime_mesher* m, size_t* n) {
  if (!m) return null_arg("mesher");
  if (!n) return null_arg("n");
  *n = m->mesher.state().triangles.size();
  return TRIME_OK;
}

trime_status trime_mesher_copy_points(const trime_mesher* m, double* xy, size_t size) {
  if (!m) return null_arg("mesher");
  const auto& pts = m->mesher.state().points;
  if (!xy || size < 2 * pts.size()) return fail(TRIME_ERR_BUFFER_TOO_SMALL, "buffer too small");
  for (size_t i = 0; i < pts.size(); ++i) {
    xy[2 * i] = pts[i].x;
    xy[2 * i + 1] = pts[i].y;
  }
  return TRIME_OK;
}

trime_status trime_mesher_copy_categories(const trime_mesher* m, int* cat, size_t size) {
  if (!m) return null_arg("mesher");
  const auto& c = m->mesher.state().category;
  if (!cat || size < c.size()) return fail(TRIME_ERR_BUFFER_TOO_SMALL, "buffer too small");
  for (size_t i = 0; i < c.size(); ++i) {
    cat[i] = c[i] == trime::PointCategory::Boundary ? TRIME_POINT_BOUNDARY : TRIME_POINT_INNER;
  }
  return TRIME_OK;
}

trime_status trime_mesher_copy_triangles(const trime_mesher* m, uint32_t* ijk, size_t size) {
  if (!m) return null_arg("mesher");
  const auto& t = m->mesher.state().triangles;
  if (!ijk || size < 3 * t.size()) return fail(TRIME_ERR_BUFFER_TOO_SMALL, "buffer too small");
  for (size_t i = 0; i < t.size(); ++i) {
    for (int k = 0; k < 3; ++k) ijk[3 * i + k] = t[i][k];
  }
  return TRIME_OK;
}

trime_status trime_mesher_iterations(const trime_mesher* m, long long* n) {
  if (!m) return null_arg("mesher");
  if (!n) return null_arg("n");
  *n = m->mesher.iteration();
  return TRIME_OK;
}

trime_status trime_mesher_reason(const trime_mesher* m, char* buf, size_t size, size_t* needed) {
  if (!m) return null_arg("mesher");
  return copy_string(m->mesher.reason(), buf, size, needed);
}

trime_status trime_mesher_summary(const trime_mesher* m, trime_summary* out) {
  if (!m) return null_arg("mesher");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto& st = m->mesher.state();
    const trime::SummaryStats s = trime::summary_stats(st.points, st.triangles);
    *out = trime_summary{s.count,          s.median_alpha,       s.mean_alpha,
                         s.max_alpha,      s.stdev_alpha,        s.median_beta,
                         s.mean_beta,      s.max_beta,           s.stdev_beta,
                         s.pct_alpha_below_1_2, s.pct_alpha_below_2};
    return TRIME_OK;
  });
}

void trime_mesher_destroy(trime_mesher* m) { delete m; }

trime_status trime_shape_create(const char* spec, double x0, double x1, double y0, double y1,
                                trime_shape** out) {
  if (!spec) return null_arg("spec");
  if (!out) return null_arg("out");
  return guarded([&] {
    const trime::Box box{x0, x1, y0, y1};
    if (!box.valid()) return fail(TRIME_ERR_INVALID_ARGUMENT, "domain needs x0 < x1, y0 < y1");
    *out = new trime_shape{trime::build_shape(trime::parse_shape_spec(spec), box, {})};
    return TRIME_OK;
  });
}

trime_status trime_shape_sdf(const trime_shape* s, double x, double y, double* out) {
  if (!s) return null_arg("shape");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = s->shape.sdf({x, y});
    return TRIME_OK;
  });
}

void trime_shape_destroy(trime_shape* s) { delete s; }

}  // extern "C"
