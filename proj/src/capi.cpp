// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/nsmix.h"

#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "nsmix/error.hpp"
#include "nsmix/integrator.hpp"
#include "nsmix/noise.hpp"
#include "nsmix/runner.hpp"
#include "nsmix/spectral.hpp"

struct nsmix_model {
  nsmix::GalerkinModel model;
};

struct nsmix_noise {
  nsmix::NoiseSpec spec;
};

struct nsmix_trajectory {
  nsmix::TrajectoryRecord record;
};

namespace {

thread_local std::string last_error;

nsmix_status set_error(nsmix_status status, const std::string& what) {
  last_error = what;
  return status;
}

nsmix_status map_code(nsmix::ErrorCode code) {
  return static_cast<nsmix_status>(static_cast<int>(code));
}

template <typename Fn>
nsmix_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return NSMIX_OK;
  } catch (const nsmix::Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(NSMIX_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(NSMIX_E_INTERNAL, e.what());
  }
}

#define NSMIX_CHECK_NULL(p)                                              \
  do {                                                                   \
    if ((p) == nullptr) return set_error(NSMIX_E_NULL_POINTER, #p " is null"); \
  } while (0)

}  // namespace

extern "C" {

const char* nsmix_version(void) { return NSMIX_VERSION_STRING; }

const char* nsmix_last_error(void) { return last_error.c_str(); }

const char* nsmix_status_string(nsmix_status status) {
  switch (status) {
    case NSMIX_OK: return "ok";
    case NSMIX_E_INVALID_ARGUMENT: return "invalid argument";
    case NSMIX_E_DIMENSION_MISMATCH: return "dimension mismatch";
    case NSMIX_E_DEGENERATE_NOISE: return "degenerate noise";
    case NSMIX_E_MISSING_NOISE_RECORD: return "missing noise record";
    case NSMIX_E_OFF_GRID: return "time off grid";
    case NSMIX_E_BLOW_UP: return "blow-up";
    case NSMIX_E_INSUFFICIENT_DATA: return "insufficient data";
    case NSMIX_E_CONFIG: return "configuration error";
    case NSMIX_E_IO: return "i/o error";
    case NSMIX_E_CENSORING_OVERFLOW: return "censoring overflow";
    case NSMIX_E_NULL_POINTER: return "null pointer";
    case NSMIX_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

nsmix_status nsmix_model_create_shell(int n_shells, double coupling, double mu1, double lambda,
                                      double nu, double forcing_amplitude, nsmix_model** out) {
  NSMIX_CHECK_NULL(out);
  *out = nullptr;
  return guarded([&] {
    nsmix::ShellParams p;
    p.n_shells = n_shells;
    p.coupling = coupling;
    p.mu1 = mu1;
    p.lambda = lambda;
    nsmix::Forcing f;
    f.amplitude = forcing_amplitude;
    f.modes = {0};
    *out = new nsmix_model{nsmix::GalerkinModel::shell(p, nu, f)};
  });
}

nsmix_status nsmix_model_create_torus(int cutoff, double nu, double forcing_amplitude,
                                      nsmix_model** out) {
  NSMIX_CHECK_NULL(out);
  *out = nullptr;
  return guarded([&] {
    nsmix::Forcing f;
    f.amplitude = forcing_amplitude;
    f.modes = {0};
    *out = new nsmix_model{nsmix::GalerkinModel::torus(cutoff, nu, f)};
  });
}

void nsmix_model_destroy(nsmix_model* model) { delete model; }

size_t nsmix_model_size(const nsmix_model* model) { return model ? model->model.size() : 0; }

nsmix_status nsmix_model_eigenvalues(const nsmix_model* model, double* out, size_t n) {
  NSMIX_CHECK_NULL(model);
  NSMIX_CHECK_NULL(out);
  if (n != model->model.size()) {
    return set_error(NSMIX_E_DIMENSION_MISMATCH, "eigenvalue buffer has the wrong length");
  }
  const auto mu = model->model.eigenvalues();
  std::copy(mu.begin(), mu.end(), out);
  return NSMIX_OK;
}

nsmix_status nsmix_model_bilinear(const nsmix_model* model, const double* u, const double* v,
                                  double* out, size_t n) {
  NSMIX_CHECK_NULL(model);
  NSMIX_CHECK_NULL(u);
  NSMIX_CHECK_NULL(v);
  NSMIX_CHECK_NULL(out);
  return guarded([&] {
    const auto b = nsmix::bilinear_B(model->model, {u, n}, {v, n});
    std::copy(b.begin(), b.end(), out);
  });
}

nsmix_status nsmix_noise_create(const nsmix_model* model, nsmix_noise_kind kind,
                                double decay_exponent, double modulation, double scale,
                                nsmix_noise** out) {
  NSMIX_CHECK_NULL(model);
  NSMIX_CHECK_NULL(out);
  *out = nullptr;
  return guarded([&] {
    const auto k = kind == NSMIX_NOISE_MODULATED ? nsmix::NoiseKind::kModulatedDiagonal
                                                 : nsmix::NoiseKind::kConstantDiagonal;
    *out = new nsmix_noise{nsmix::NoiseSpec(model->model, k, decay_exponent, modulation, scale)};
  });
}

void nsmix_noise_destroy(nsmix_noise* noise) { delete noise; }

nsmix_status nsmix_simulate(const nsmix_model* model, const nsmix_noise* noise, const double* x0,
                            size_t n, double horizon, double dt, uint64_t seed, uint64_t stream,
                            nsmix_scheme scheme, nsmix_trajectory** out) {
  NSMIX_CHECK_NULL(model);
  NSMIX_CHECK_NULL(noise);
  NSMIX_CHECK_NULL(x0);
  NSMIX_CHECK_NULL(out);
  *out = nullptr;
  return guarded([&] {
    const double step = dt > 0.0 ? dt : nsmix::default_dt(model->model);
    const auto s = scheme == NSMIX_SCHEME_EULER_MARUYAMA ? nsmix::Scheme::kEulerMaruyama
                                                         : nsmix::Scheme::kSemiImplicit;
    auto rec = nsmix::simulate_path(model->model, noise->spec, {x0, n}, horizon, step,
                                    nsmix::RngStream(seed, stream), s);
    *out = new nsmix_trajectory{std::move(rec)};
  });
}

void nsmix_trajectory_destroy(nsmix_trajectory* trajectory) { delete trajectory; }

size_t nsmix_trajectory_length(const nsmix_trajectory* trajectory) {
  return trajectory ? trajectory->record.states.size() : 0;
}

int nsmix_trajectory_blew_up(const nsmix_trajectory* trajectory) {
  return trajectory && trajectory->record.blew_up ? 1 : 0;
}

nsmix_status nsmix_trajectory_state(const nsmix_trajectory* trajectory, size_t index,
                                    double* time, double* out, size_t n) {
  NSMIX_CHECK_NULL(trajectory);
  const auto& r = trajectory->record;
  if (index >= r.states.size()) return set_error(NSMIX_E_INVALID_ARGUMENT, "index out of range");
  if (time) *time = r.times[index];
  if (out) {
    if (n != r.states[index].size()) {
      return set_error(NSMIX_E_DIMENSION_MISMATCH, "state buffer has the wrong length");
    }
    std::copy(r.states[index].begin(), r.states[index].end(), out);
  }
  return NSMIX_OK;
}

int nsmix_run(const nsmix_run_options* options, char* message, size_t message_len) {
  auto write_message = [&](const std::string& text) {
    if (message && message_len > 0) {
      const size_t k = std::min(text.size(), message_len - 1);
      std::memcpy(message, text.data(), k);
      message[k] = '\0';
    }
  };
  if (!options || !options->command || !options->config_path) {
    write_message("nsmix_run: command and config_path are required");
    return nsmix::kExitConfig;
  }
  nsmix::RunOutcome outcome;
  try {
    nsmix::RunRequest req;
    req.command = options->command;
    req.config_path = options->config_path;
    if (options->output_dir) req.output_dir = options->output_dir;
    if (options->has_seed) req.seed = options->seed;
    req.threads = options->threads;
    for (size_t i = 0; i < options->n_overrides; ++i) {
      if (options->overrides[i]) req.overrides.emplace_back(options->overrides[i]);
    }
    outcome = nsmix::run(req);
  } catch (const std::exception& e) {
    outcome.exit_code = nsmix::kExitFailure;
    outcome.message = e.what();
  }
  write_message(outcome.message);
  return outcome.exit_code;
}

}  // extern "C"
