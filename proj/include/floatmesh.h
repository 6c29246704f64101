/* C interface to the floating-mesh reconstruction library.
 *
 * Every function that can fail returns an fmr_status; on failure a
 * human-readable message is available from fmr_last_error() (thread local,
 * valid until the next failing call on the same thread). Handles returned
 * through out-parameters are owned by the caller and must be released with
 * the matching *_free function. Passing NULL where a handle is required is
 * reported as FMR_ERR_INVALID, never a crash.
 */
#ifndef FLOATMESH_H
#define FLOATMESH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fmr_status {
    FMR_OK = 0,
    FMR_ERR_INVALID = 1, /* bad arguments or malformed input data */
    FMR_ERR_IO = 2,      /* file could not be read or written */
    FMR_ERR_RUNTIME = 3  /* anything else (numerical failure, ...) */
} fmr_status;

typedef struct fmr_image fmr_image;   /* real-valued grid (image, xi field, strength map) */
typedef struct fmr_mesh fmr_mesh;     /* floating mesh: samples at real positions */
typedef struct fmr_params fmr_params; /* sigmoid strength-law parameters */

const char* fmr_version(void);
const char* fmr_last_error(void);

/* 0 = one worker per hardware thread. Applies process-wide. */
void fmr_set_threads(int n);

/* ---- images ---- */
fmr_status fmr_image_create(int width, int height, const double* data /* nullable */,
                            fmr_image** out);
fmr_status fmr_image_read_pgm(const char* path, fmr_image** out);
fmr_status fmr_image_write_pgm(const fmr_image* img, const char* path);
int fmr_image_width(const fmr_image* img);
int fmr_image_height(const fmr_image* img);
const double* fmr_image_data(const fmr_image* img); /* row major, height*width */
void fmr_image_free(fmr_image* img);

/* PSNR in dB between two same-sized images, 255 peak, capped at 100. */
fmr_status fmr_psnr(const fmr_image* reference, const fmr_image* test, double* out_db);

/* ---- meshes ---- */
fmr_status fmr_mesh_read(const char* path, fmr_mesh** out);
fmr_status fmr_mesh_write(const fmr_mesh* mesh, const char* path);
size_t fmr_mesh_size(const fmr_mesh* mesh);
void fmr_mesh_free(fmr_mesh* mesh);

/* Rotates every pixel of img about the image center by `degrees`. */
fmr_status fmr_mesh_from_rotation(const fmr_image* img, double degrees, fmr_mesh** out);

/* Uniform subsample without replacement; count = round(ratio * ref_pixel_count). */
fmr_status fmr_mesh_sample(const fmr_mesh* mesh, double ratio, uint64_t ref_pixel_count,
                           uint64_t seed, fmr_mesh** out);

/* ---- strength parameters ---- */
/* method is one of "nn", "li", "ci", "ni" (case insensitive). */
fmr_status fmr_params_default(const char* method, fmr_params** out);
fmr_status fmr_params_read(const char* path, fmr_params** out);
fmr_status fmr_params_get(const fmr_params* p, double* alpha, double* beta, double* gamma);
fmr_status fmr_params_sigma_opt(const fmr_params* p, double xi, double* out_sigma2);
void fmr_params_free(fmr_params* p);

/* ---- pipeline ---- */
fmr_status fmr_reconstruct(const fmr_mesh* mesh, int width, int height, const char* method,
                           fmr_image** out);

/* Effective-data field: per pixel sum of e^-distance over mesh samples within
 * truncation_radius (pass <= 0 for the default, 25). */
fmr_status fmr_compute_xi(const fmr_mesh* mesh, int width, int height, double truncation_radius,
                          fmr_image** out);

/* denoiser is "bm3d" or "blend". Uniform strength sigma2 everywhere. */
fmr_status fmr_denoise_uniform(const fmr_image* img, double sigma2, const char* denoiser,
                               fmr_image** out);

/* Per-pixel strength from a same-sized map of sigma^2 values. */
fmr_status fmr_denoise_map(const fmr_image* img, const fmr_image* strength, const char* denoiser,
                           fmr_image** out);

/* Full adaptive refinement: reconstruct, measure xi, map to strength with
 * `params` (NULL = calibrated defaults for `method`), denoise. Any of the
 * three image out-parameters may be NULL when not wanted. */
fmr_status fmr_refine(const fmr_mesh* mesh, int width, int height, const char* method,
                      const fmr_params* params /* nullable */, const char* denoiser,
                      double truncation_radius, fmr_image** out_initial /* nullable */,
                      fmr_image** out_refined, fmr_image** out_xi /* nullable */);

/* ---- experiments ---- */
/* Fits the strength sigmoid on a directory of .pgm images. Each image is
 * low-pass filtered and split into a phi-decimated reference plus floating
 * mesh; meshes are subsampled at each ratio in `ratios` (n_ratios of them,
 * NULL = a default ladder) and pooled into one gain surface. Writes a
 * key=value params file to out_path and optionally reports the fit. */
fmr_status fmr_calibrate(const char* corpus_dir, int phi, const char* method,
                         const char* denoiser, const double* ratios, size_t n_ratios,
                         uint64_t seed, const char* out_path,
                         double* out_residual /* nullable */, fmr_params** out_params /* nullable */);

/* Runs the benchmark described by a key=value spec file and writes the CSV
 * report (columns image,method,ratio,psnr_initial_db,psnr_refined_db,gain_db,seed). */
fmr_status fmr_benchmark(const char* spec_path, const char* csv_out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FLOATMESH_H */
