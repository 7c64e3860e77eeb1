// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "nsmix/error.hpp"

namespace nsmix {

const char* to_string(Scheme scheme) {
  return scheme == Scheme::kSemiImplicit ? "semi_implicit" : "euler_maruyama";
}

Stepper::Stepper(const GalerkinModel& model, const NoiseSpec& noise, Scheme scheme, double dt)
    : model_(&model), noise_(&noise), scheme_(scheme), dt_(dt), sqrt_dt_(std::sqrt(dt)) {
  require(std::isfinite(dt) && dt > 0.0, ErrorCode::kInvalidArgument, "time step must be positive");
  require(noise.size() == model.size(), ErrorCode::kDimensionMismatch,
          "noise spec built for a different model");
  const auto mu = model.eigenvalues();
  gain_.resize(mu.size());
  linear_.resize(mu.size());
  for (std::size_t n = 0; n < mu.size(); ++n) {
    const double rate = model.viscosity() * mu[n];
    gain_[n] = scheme == Scheme::kSemiImplicit ? std::exp(-rate * dt) : 1.0;
    linear_[n] = 1.0 - dt * rate;
  }
}

void Stepper::mean(std::span<const double> x, std::span<double> out) const {
  const auto& f = model_->forcing();
  const std::size_t d = x.size();
  for (std::size_t n = 0; n < d; ++n) out[n] = dt_ * f[n];
  accumulate_B(*model_, x, x, -dt_, out);
  if (scheme_ == Scheme::kSemiImplicit) {
    for (std::size_t n = 0; n < d; ++n) out[n] = gain_[n] * (x[n] + out[n]);
  } else {
    for (std::size_t n = 0; n < d; ++n) out[n] += linear_[n] * x[n];
  }
}

void Stepper::std_dev(std::span<const double> x, std::span<double> out) const {
  const double m = noise_->modulation_factor(x);
  const auto b = noise_->base_amplitudes();
  for (std::size_t n = 0; n < x.size(); ++n) out[n] = gain_[n] * b[n] * m * sqrt_dt_;
}

bool Stepper::advance(std::span<double> x, std::span<const double> dw) const {
  const std::size_t d = x.size();
  const double m = noise_->modulation_factor(x);
  const auto b = noise_->base_amplitudes();
  const auto& f = model_->forcing();
  // Small fixed-size scratch avoids allocation in the Monte Carlo loops.
  double stack_buf[64];
  std::vector<double> heap_buf;
  double* drift = stack_buf;
  if (d > 64) {
    heap_buf.resize(d);
    drift = heap_buf.data();
  }
  std::span<double> drift_span(drift, d);
  for (std::size_t n = 0; n < d; ++n) drift[n] = dt_ * f[n];
  accumulate_B(*model_, x, x, -dt_, drift_span);
  bool finite = true;
  if (scheme_ == Scheme::kSemiImplicit) {
    for (std::size_t n = 0; n < d; ++n) {
      x[n] = gain_[n] * (x[n] + drift[n] + b[n] * m * dw[n]);
      finite = finite && std::isfinite(x[n]);
    }
  } else {
    for (std::size_t n = 0; n < d; ++n) {
      x[n] = linear_[n] * x[n] + drift[n] + b[n] * m * dw[n];
      finite = finite && std::isfinite(x[n]);
    }
  }
  return finite;
}

bool Stepper::advance(std::span<double> x, RngStream& rng, std::span<double> dw) const {
  rng.fill_normal(dw, sqrt_dt_);
  return advance(x, std::span<const double>(dw.data(), dw.size()));
}

double default_dt(const GalerkinModel& model) {
  const double mu_max = model.eigenvalues().back();
  return std::min(1e-3, 0.1 / (model.viscosity() * mu_max));
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

SpectralState step(const GalerkinModel& model, const NoiseSpec& noise, Scheme scheme,
                   std::span<const double> x, double dt, std::span<const double> dw) {
  model.check_conforms(x, "step");
  model.check_conforms(dw, "step");
  Stepper stepper(model, noise, scheme, dt);
  SpectralState out(x.begin(), x.end());
  stepper.advance(out, dw);
  return out;
}

namespace {

std::size_t steps_for(double horizon, double dt) {
  require(std::isfinite(horizon) && horizon >= dt && dt > 0.0, ErrorCode::kInvalidArgument,
          "simulate: need horizon >= dt > 0");
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

}  // namespace

TrajectoryRecord simulate_path(const GalerkinModel& model, const NoiseSpec& noise,
                               std::span<const double> x0, double horizon, double dt,
                               const RngStream& stream, Scheme scheme) {
  model.check_conforms(x0, "simulate_path");
  require(all_finite(x0), ErrorCode::kInvalidArgument, "simulate_path: non-finite initial state");
  const std::size_t n_steps = steps_for(horizon, dt);
  Stepper stepper(model, noise, scheme, dt);
  RngStream rng = stream;

  TrajectoryRecord rec;
  rec.dt = dt;
  rec.scheme = scheme;
  rec.seed = stream.root_seed();
  rec.stream = stream.stream_index();
  rec.times.reserve(n_steps + 1);
  rec.states.reserve(n_steps + 1);
  rec.increments.reserve(n_steps);
  rec.times.push_back(0.0);
  rec.states.emplace_back(x0.begin(), x0.end());
  SpectralState x(x0.begin(), x0.end());
  std::vector<double> dw(model.size());
  for (std::size_t i = 0; i < n_steps; ++i) {
    if (!stepper.advance(x, rng, dw)) {
      rec.blew_up = true;
      break;
    }
    rec.increments.push_back(dw);
    rec.states.push_back(x);
    rec.times.push_back(static_cast<double>(i + 1) * dt);
  }
  return rec;
}

TrajectoryRecord replay_path(const GalerkinModel& model, const NoiseSpec& noise,
                             std::span<const double> x0, double dt,
                             const std::vector<std::vector<double>>& increments, Scheme scheme) {
  model.check_conforms(x0, "replay_path");
  Stepper stepper(model, noise, scheme, dt);
  TrajectoryRecord rec;
  rec.dt = dt;
  rec.scheme = scheme;
  rec.times.push_back(0.0);
  rec.states.emplace_back(x0.begin(), x0.end());
  SpectralState x(x0.begin(), x0.end());
  for (std::size_t i = 0; i < increments.size(); ++i) {
    model.check_conforms(increments[i], "replay_path increment");
    if (!stepper.advance(x, increments[i])) {
      rec.blew_up = true;
      break;
    }
    rec.increments.push_back(increments[i]);
    rec.states.push_back(x);
    rec.times.push_back(static_cast<double>(i + 1) * dt);
  }
  return rec;
}

std::vector<std::vector<double>> coarsen_increments(
    const std::vector<std::vector<double>>& increments) {
  std::vector<std::vector<double>> out;
  out.reserve(increments.size() / 2);
  for (std::size_t i = 0; i + 1 < increments.size(); i += 2) {
    std::vector<double> sum(increments[i]);
    for (std::size_t n = 0; n < sum.size(); ++n) sum[n] += increments[i + 1][n];
    out.push_back(std::move(sum));
  }
  return out;
}

std::size_t grid_index(const TrajectoryRecord& trajectory, double t) {
  const double r = t / trajectory.dt;
  const double k = std::round(r);
  if (!(std::abs(r - k) <= 1e-9 * std::max(1.0, std::abs(r))) || k < 0.0 ||
      static_cast<std::size_t>(k) >= trajectory.states.size()) {
    fail(ErrorCode::kOffGrid, "time " + std::to_string(t) + " is not on the trajectory grid");
  }
  return static_cast<std::size_t>(k);
}

double h1_energy(const GalerkinModel& model, const TrajectoryRecord& trajectory, double t) {
  const std::size_t k = grid_index(trajectory, t);
  double integral = 0.0;
  double prev = sobolev_norm_sq(model, 2.0, trajectory.states[0]);
  for (std::size_t i = 1; i <= k; ++i) {
    const double cur = sobolev_norm_sq(model, 2.0, trajectory.states[i]);
    integral += 0.5 * trajectory.dt * (prev + cur);
    prev = cur;
  }
  return sobolev_norm_sq(model, 1.0, trajectory.states[k]) + integral;
}

double sigma_stop(const GalerkinModel& model, const TrajectoryRecord& trajectory, double k0,
                  double horizon) {
  const std::size_t last = grid_index(trajectory, horizon);
  const double threshold = k0 + 1.0;
  double integral = 0.0;
  if (integral >= threshold) return trajectory.times[0];
  double prev = sobolev_norm_sq(model, 2.0, trajectory.states[0]);
  for (std::size_t i = 1; i <= last; ++i) {
    const double cur = sobolev_norm_sq(model, 2.0, trajectory.states[i]);
    integral += 0.5 * trajectory.dt * (prev + cur);
    prev = cur;
    if (integral >= threshold) return trajectory.times[i];
  }
  return horizon;
}

YZDecomposition decompose_YZ(const GalerkinModel& model, const NoiseSpec& noise,
                             const TrajectoryRecord& trajectory) {
  YZDecomposition out;
  out.z = stochastic_convolution(model, noise, trajectory);
  const std::size_t d = model.size();
  const double dt = trajectory.dt;
  const auto mu = model.eigenvalues();
  const auto& f = model.forcing();
  std::vector<double> decay(d);
  for (std::size_t n = 0; n < d; ++n) decay[n] = std::exp(-model.viscosity() * mu[n] * dt);

  out.y.reserve(trajectory.states.size());
  for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
    SpectralState y(d);
    for (std::size_t n = 0; n < d; ++n) y[n] = trajectory.states[i][n] - out.z[i][n];
    out.y.push_back(std::move(y));
  }

  // N(Y, Z) = -B(Y + Z) + f
  auto nonlinear = [&](const SpectralState& y, const SpectralState& z) {
    SpectralState sum(d), r(f);
    for (std::size_t n = 0; n < d; ++n) sum[n] = y[n] + z[n];
    accumulate_B(model, sum, sum, -1.0, r);
    return r;
  };

  out.y_reintegrated.reserve(trajectory.states.size());
  out.y_reintegrated.push_back(trajectory.states[0]);
  for (std::size_t i = 0; i + 1 < trajectory.states.size(); ++i) {
    const SpectralState& y = out.y_reintegrated.back();
    const SpectralState n0 = nonlinear(y, out.z[i]);
    SpectralState pred(d);
    for (std::size_t n = 0; n < d; ++n) pred[n] = decay[n] * (y[n] + dt * n0[n]);
    const SpectralState n1 = nonlinear(pred, out.z[i + 1]);
    SpectralState next(d);
    for (std::size_t n = 0; n < d; ++n) {
      next[n] = decay[n] * y[n] + 0.5 * dt * (decay[n] * n0[n] + n1[n]);
    }
    out.y_reintegrated.push_back(std::move(next));
  }

  for (std::size_t i = 0; i < out.y.size(); ++i) {
    double e = 0.0;
    for (std::size_t n = 0; n < d; ++n) {
      const double diff = out.y[i][n] - out.y_reintegrated[i][n];
      e += diff * diff;
    }
    out.defect = std::max(out.defect, std::sqrt(e));
  }
  return out;
}

}  // namespace nsmix
