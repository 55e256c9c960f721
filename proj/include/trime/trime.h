/* C interface to the trime mesh generator.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Functions return a trime_status; on failure a description is available
 * from trime_last_error() on the same thread until the next failing call.
 */
#ifndef TRIME_H
#define TRIME_H

#include <stddef.h>
#include <stdint.h>

#if defined(TRIME_BUILDING_LIBRARY)
#define TRIME_API __attribute__((visibility("default")))
#else
#define TRIME_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum trime_status {
  TRIME_OK = 0,
  TRIME_ERR_INVALID_ARGUMENT = 1,
  TRIME_ERR_EMPTY_CONTOUR = 2,
  TRIME_ERR_INVALID_CONTOUR = 3,
  TRIME_ERR_DEGENERATE_DOMAIN = 4,
  TRIME_ERR_ZERO_DENSITY_CELL = 5,
  TRIME_ERR_NOT_BOUNDARY_CELL = 6,
  TRIME_ERR_PROJECTION_STARVATION = 7,
  TRIME_ERR_EMPTY_MEDIAL_AXIS = 8,
  TRIME_ERR_DEGENERATE_LFS = 9,
  TRIME_ERR_DEGENERATE_TRIANGLE = 10,
  TRIME_ERR_EMPTY_LIST = 11,
  TRIME_ERR_EMPTY_TRIANGULATION = 12,
  TRIME_ERR_DEGENERATE_CELL = 13,
  TRIME_ERR_NO_CONVERGENCE = 14,
  TRIME_ERR_NEWTON_DIVERGED = 15,
  TRIME_ERR_PARSE = 16,
  TRIME_ERR_VALIDATION = 17,
  TRIME_ERR_IO = 18,
  TRIME_ERR_INVALID_STATE = 19,
  TRIME_ERR_BUFFER_TOO_SMALL = 20,
  TRIME_ERR_INTERNAL = 99
} trime_status;

typedef struct trime_config trime_config;
typedef struct trime_mesher trime_mesher;
typedef struct trime_shape trime_shape;

/* Point categories as reported by trime_mesher_copy_categories. */
enum { TRIME_POINT_INNER = 0, TRIME_POINT_BOUNDARY = 1 };

typedef struct trime_summary {
  size_t count;
  double median_alpha, mean_alpha, max_alpha, stdev_alpha;
  double median_beta, mean_beta, max_beta, stdev_beta;
  double pct_alpha_below_1_2;
  double pct_alpha_below_2;
} trime_summary;

TRIME_API const char* trime_version(void);
TRIME_API const char* trime_status_name(trime_status status);
TRIME_API const char* trime_last_error(void);

/* Configuration. A fresh config holds every default. */
TRIME_API trime_status trime_config_create(trime_config** out);
TRIME_API trime_status trime_config_parse(const char* text, trime_config** out);
TRIME_API trime_status trime_config_load(const char* path, trime_config** out);
TRIME_API trime_status trime_config_set(trime_config* cfg, const char* key, const char* value);
/* Writes the printed config (NUL terminated) into buf. *needed receives the
 * required size including the terminator, also when buf is too small. */
TRIME_API trime_status trime_config_print(const trime_config* cfg, char* buf, size_t size,
                                          size_t* needed);
TRIME_API trime_status trime_config_validate(const trime_config* cfg);
TRIME_API void trime_config_destroy(trime_config* cfg);

/* Meshing. The mesher keeps its own copy of the config. */
TRIME_API trime_status trime_mesher_create(const trime_config* cfg, trime_mesher** out);
TRIME_API trime_status trime_mesher_initialize(trime_mesher* m);
/* One iteration; *done becomes 1 once a termination criterion fired. */
TRIME_API trime_status trime_mesher_step(trime_mesher* m, int* done);
/* Iterates to termination and retriangulates; writes the final mesh, SVG
 * and statistics into the configured output directory when write_files. */
TRIME_API trime_status trime_mesher_run(trime_mesher* m, int write_files);
TRIME_API trime_status trime_mesher_finalize(trime_mesher* m, int write_files);
TRIME_API trime_status trime_mesher_point_count(const trime_mesher* m, size_t* n);
TRIME_API trime_status trime_mesher_triangle_count(const trime_mesher* m, size_t* n);
/* xy receives 2 * point_count doubles. */
TRIME_API trime_status trime_mesher_copy_points(const trime_mesher* m, double* xy, size_t size);
TRIME_API trime_status trime_mesher_copy_categories(const trime_mesher* m, int* cat, size_t size);
/* ijk receives 3 * triangle_count indices. */
TRIME_API trime_status trime_mesher_copy_triangles(const trime_mesher* m, uint32_t* ijk,
                                                   size_t size);
TRIME_API trime_status trime_mesher_iterations(const trime_mesher* m, long long* n);
/* Termination reason: "quality", "movement", "iteration_cap", or empty. */
TRIME_API trime_status trime_mesher_reason(const trime_mesher* m, char* buf, size_t size,
                                           size_t* needed);
/* Quality summary of the current triangles. */
TRIME_API trime_status trime_mesher_summary(const trime_mesher* m, trime_summary* out);
TRIME_API void trime_mesher_destroy(trime_mesher* m);

/* Standalone shape evaluation using the config shape grammar. */
TRIME_API trime_status trime_shape_create(const char* spec, double x0, double x1, double y0,
                                          double y1, trime_shape** out);
TRIME_API trime_status trime_shape_sdf(const trime_shape* s, double x, double y, double* out);
TRIME_API void trime_shape_destroy(trime_shape* s);

#ifdef __cplusplus
}
#endif

#endif /* TRIME_H */
