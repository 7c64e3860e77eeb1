// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/derivative_flow.hpp"

#include <cmath>

#include "nsmix/error.hpp"

namespace nsmix {

void tangent_step(const Stepper& stepper, std::span<const double> x, std::span<const double> dw,
                  std::span<double> eta) {
  const GalerkinModel& model = stepper.model();
  const NoiseSpec& noise = stepper.noise();
  const std::size_t d = eta.size();
  const double dt = stepper.dt();
  const auto gain = stepper.gain();
  const auto b = noise.base_amplitudes();
  const double dm = noise.modulation_derivative(x, eta);

  SpectralState drift(d, 0.0);
  accumulate_B(model, x, eta, -dt, drift);
  accumulate_B(model, eta, x, -dt, drift);
  if (stepper.scheme() == Scheme::kSemiImplicit) {
    for (std::size_t n = 0; n < d; ++n) {
      eta[n] = gain[n] * (eta[n] + drift[n] + b[n] * dm * dw[n]);
    }
  } else {
    const auto mu = model.eigenvalues();
    const double nu = model.viscosity();
    for (std::size_t n = 0; n < d; ++n) {
      eta[n] = (1.0 - dt * nu * mu[n]) * eta[n] + drift[n] + b[n] * dm * dw[n];
    }
  }
}

EtaRecord evolve_eta(const GalerkinModel& model, const NoiseSpec& noise,
                     const TrajectoryRecord& trajectory, double start_time,
                     std::span<const double> h) {
  model.check_conforms(h, "evolve_eta");
  require(trajectory.increments.size() + 1 == trajectory.states.size(),
          ErrorCode::kMissingNoiseRecord, "evolve_eta: trajectory lacks its noise record");
  const std::size_t start = grid_index(trajectory, start_time);
  Stepper stepper(model, noise, trajectory.scheme, trajectory.dt);

  EtaRecord rec;
  rec.base = &trajectory;
  rec.start_index = start;
  rec.start_time = trajectory.times[start];
  rec.direction.assign(h.begin(), h.end());
  rec.path.reserve(trajectory.states.size() - start);
  SpectralState eta(h.begin(), h.end());
  rec.path.push_back(eta);
  for (std::size_t i = start; i < trajectory.increments.size(); ++i) {
    tangent_step(stepper, trajectory.states[i], trajectory.increments[i], eta);
    if (!all_finite(eta)) {
      rec.blew_up = true;
      break;
    }
    rec.path.push_back(eta);
  }
  return rec;
}

SpectralState fd_directional_derivative(const GalerkinModel& model, const NoiseSpec& noise,
                                        std::span<const double> x0, std::span<const double> h,
                                        double eps, double horizon, double dt,
                                        const RngStream& stream, Scheme scheme) {
  model.check_conforms(x0, "fd_directional_derivative");
  model.check_conforms(h, "fd_directional_derivative");
  require(eps > 0.0 && std::isfinite(eps), ErrorCode::kInvalidArgument,
          "fd_directional_derivative: eps must be positive");
  const std::size_t d = model.size();
  SpectralState plus(d), minus(d);
  for (std::size_t n = 0; n < d; ++n) {
    plus[n] = x0[n] + eps * h[n];
    minus[n] = x0[n] - eps * h[n];
  }
  const TrajectoryRecord a = simulate_path(model, noise, plus, horizon, dt, stream, scheme);
  const TrajectoryRecord b = simulate_path(model, noise, minus, horizon, dt, stream, scheme);
  if (a.blew_up || b.blew_up) {
    fail(ErrorCode::kBlowUp, "fd_directional_derivative: a perturbed path blew up");
  }
  SpectralState out(d);
  for (std::size_t n = 0; n < d; ++n) {
    out[n] = (a.final_state()[n] - b.final_state()[n]) / (2.0 * eps);
  }
  return out;
}

double eta_h3_budget(const GalerkinModel& model, const EtaRecord& eta, double sigma) {
  require(eta.base != nullptr, ErrorCode::kInvalidArgument, "eta_h3_budget: detached record");
  const double dt = eta.base->dt;
  const double span = sigma - eta.start_time;
  require(span >= -1e-12, ErrorCode::kInvalidArgument, "eta_h3_budget: sigma before start");
  const auto k = static_cast<std::size_t>(std::llround(std::max(0.0, span) / dt));
  require(k < eta.path.size(), ErrorCode::kInvalidArgument,
          "eta_h3_budget: sigma beyond the record horizon");
  double total = 0.0;
  double prev = sobolev_norm_sq(model, 3.0, eta.path[0]);
  for (std::size_t j = 1; j <= k; ++j) {
    const double cur = sobolev_norm_sq(model, 3.0, eta.path[j]);
    total += 0.5 * dt * (prev + cur);
    prev = cur;
  }
  return total;
}

}  // namespace nsmix
