/* Copyright 2026 The nsmix Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the nsmix simulator. Objects are opaque handles created and
 * destroyed through this API; every fallible call returns an nsmix_status and
 * leaves a description in nsmix_last_error() (per thread).
 */
#ifndef NSMIX_NSMIX_H_
#define NSMIX_NSMIX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(NSMIX_BUILDING_LIBRARY)
#define NSMIX_API __attribute__((visibility("default")))
#else
#define NSMIX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nsmix_status {
  NSMIX_OK = 0,
  NSMIX_E_INVALID_ARGUMENT = 1,
  NSMIX_E_DIMENSION_MISMATCH = 2,
  NSMIX_E_DEGENERATE_NOISE = 3,
  NSMIX_E_MISSING_NOISE_RECORD = 4,
  NSMIX_E_OFF_GRID = 5,
  NSMIX_E_BLOW_UP = 6,
  NSMIX_E_INSUFFICIENT_DATA = 7,
  NSMIX_E_CONFIG = 8,
  NSMIX_E_IO = 9,
  NSMIX_E_CENSORING_OVERFLOW = 10,
  NSMIX_E_NULL_POINTER = 11,
  NSMIX_E_INTERNAL = 12
} nsmix_status;

typedef enum nsmix_noise_kind {
  NSMIX_NOISE_CONSTANT = 0,
  NSMIX_NOISE_MODULATED = 1
} nsmix_noise_kind;

typedef enum nsmix_scheme {
  NSMIX_SCHEME_SEMI_IMPLICIT = 0,
  NSMIX_SCHEME_EULER_MARUYAMA = 1
} nsmix_scheme;

typedef struct nsmix_model nsmix_model;
typedef struct nsmix_noise nsmix_noise;
typedef struct nsmix_trajectory nsmix_trajectory;

NSMIX_API const char* nsmix_version(void);
NSMIX_API const char* nsmix_last_error(void);
NSMIX_API const char* nsmix_status_string(nsmix_status status);

/* Shell model: eigenvalues mu1 * lambda^(2i); forcing amplitude on shell 0. */
NSMIX_API nsmix_status nsmix_model_create_shell(int n_shells, double coupling, double mu1,
                                                double lambda, double nu,
                                                double forcing_amplitude, nsmix_model** out);
/* Torus Galerkin model with 0 < |k|^2 <= cutoff; forcing on basis mode 0. */
NSMIX_API nsmix_status nsmix_model_create_torus(int cutoff, double nu, double forcing_amplitude,
                                                nsmix_model** out);
NSMIX_API void nsmix_model_destroy(nsmix_model* model);
NSMIX_API size_t nsmix_model_size(const nsmix_model* model);
NSMIX_API nsmix_status nsmix_model_eigenvalues(const nsmix_model* model, double* out, size_t n);
/* out = B(u, v) */
NSMIX_API nsmix_status nsmix_model_bilinear(const nsmix_model* model, const double* u,
                                            const double* v, double* out, size_t n);

NSMIX_API nsmix_status nsmix_noise_create(const nsmix_model* model, nsmix_noise_kind kind,
                                          double decay_exponent, double modulation,
                                          double scale, nsmix_noise** out);
NSMIX_API void nsmix_noise_destroy(nsmix_noise* noise);

/* dt <= 0 selects the model default. */
NSMIX_API nsmix_status nsmix_simulate(const nsmix_model* model, const nsmix_noise* noise,
                                      const double* x0, size_t n, double horizon, double dt,
                                      uint64_t seed, uint64_t stream, nsmix_scheme scheme,
                                      nsmix_trajectory** out);
NSMIX_API void nsmix_trajectory_destroy(nsmix_trajectory* trajectory);
NSMIX_API size_t nsmix_trajectory_length(const nsmix_trajectory* trajectory);
NSMIX_API int nsmix_trajectory_blew_up(const nsmix_trajectory* trajectory);
NSMIX_API nsmix_status nsmix_trajectory_state(const nsmix_trajectory* trajectory, size_t index,
                                              double* time, double* out, size_t n);

typedef struct nsmix_run_options {
  const char* command;
  const char* config_path;
  const char* output_dir; /* NULL keeps run.output_dir */
  int has_seed;
  uint64_t seed;
  unsigned threads; /* 0: hardware concurrency */
  const char* const* overrides;
  size_t n_overrides;
} nsmix_run_options;

/* Runs one experiment command. Returns the process exit code: 0 success,
 * 1 failure, 2 configuration error, 3 censoring overflow. The message buffer
 * receives a NUL-terminated diagnostic when non-NULL. */
NSMIX_API int nsmix_run(const nsmix_run_options* options, char* message, size_t message_len);

#ifdef __cplusplus
}
#endif

#endif /* NSMIX_NSMIX_H_ */
