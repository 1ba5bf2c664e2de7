/* C interface to the tropedge library. All handles are opaque; every
 * function returning te_status records a message retrievable with
 * te_last_error() on failure. Strings returned through char** are owned by
 * the caller and released with te_string_free(). */
#ifndef TROPEDGE_TROPEDGE_H
#define TROPEDGE_TROPEDGE_H

#include <stddef.h>

#if defined(_WIN32)
#define TE_API __declspec(dllexport)
#else
#define TE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum te_status {
  TE_OK = 0,
  TE_INVALID_INPUT = 1,
  TE_IO_ERROR = 2,
  TE_UNKNOWN_METHOD = 3,
  TE_EMPTY_INPUT = 4,
  TE_DIMENSION_MISMATCH = 5,
  TE_INTERNAL_ERROR = 6
} te_status;

typedef struct te_image te_image;
typedef struct te_config te_config;
typedef struct te_result te_result;

TE_API const char* te_version(void);
/* Message of the last failure on the calling thread ("" if none). */
TE_API const char* te_last_error(void);
TE_API void te_string_free(char* s);

/* Grayscale images with intensities in [0,1], row-major. */
TE_API te_status te_image_load(const char* path, te_image** out);
TE_API te_status te_image_from_gray(const double* pixels, int width, int height, te_image** out);
TE_API int te_image_width(const te_image* img);
TE_API int te_image_height(const te_image* img);
TE_API const double* te_image_pixels(const te_image* img);
/* PNG, or binary PGM when the path ends in .pgm. Values are clamped. */
TE_API te_status te_image_save(const te_image* img, const char* path);
TE_API te_status te_image_resize(const te_image* img, int width, int height, te_image** out);
/* Affine map onto [0,1]; a constant image maps to zeros. */
TE_API te_status te_image_normalize(const te_image* img, te_image** out);
/* Panels side by side in one row, left to right; heights must agree. */
TE_API te_status te_image_montage(const te_image* const* panels, size_t count, te_image** out);
TE_API void te_image_free(te_image* img);

/* Parameter overrides. section == NULL or "" addresses global keys. */
TE_API te_status te_config_create(te_config** out);
TE_API void te_config_free(te_config* cfg);
TE_API te_status te_config_set(te_config* cfg, const char* section, const char* key, const char* value);
/* Merges the entries of a config file into cfg. */
TE_API te_status te_config_load_file(te_config* cfg, const char* path);
TE_API te_status te_config_dump(const te_config* cfg, char** out);
/* Every key of the effective spec for a method, as a config section. */
TE_API te_status te_config_dump_method(const te_config* cfg, const char* method, char** out);

TE_API int te_method_is_known(const char* method);
TE_API size_t te_method_count(void);
TE_API const char* te_method_name(size_t index);

/* Runs each method on the same input; cfg may be NULL. Results keep the
 * order of `methods`. threads caps concurrent methods (0 means 1). */
TE_API te_status te_run(const te_image* gray, const char* const* methods, size_t count, const te_config* cfg,
                        unsigned threads, te_result** out);
/* Report for an existing edge map (pixels >= 0.5 are edges). cfg may be NULL. */
TE_API te_status te_metrics(const te_image* original, const te_image* edges, const te_config* cfg,
                            const char* label, te_result** out);
TE_API size_t te_result_count(const te_result* res);
TE_API te_status te_result_edges(const te_result* res, size_t index, te_image** out);
TE_API size_t te_result_intermediate_count(const te_result* res, size_t index);
TE_API const char* te_result_intermediate_name(const te_result* res, size_t index, size_t stage);
TE_API te_status te_result_intermediate_image(const te_result* res, size_t index, size_t stage, te_image** out);
/* Sets the image column of every report in the result. */
TE_API te_status te_result_set_label(te_result* res, const char* label);
TE_API void te_result_free(te_result* res);

/* Reports of every result in order. wall_ms, when non-NULL, holds one value
 * per report and adds a wall_ms column. */
TE_API te_status te_report_csv(const te_result* const* results, size_t count, const double* wall_ms, char** out);
TE_API te_status te_report_json(const te_result* const* results, size_t count, const double* wall_ms, char** out);

#ifdef __cplusplus
}
#endif

#endif
