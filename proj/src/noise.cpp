// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/noise.hpp"

#include <algorithm>
#include <cmath>

#include "nsmix/error.hpp"
#include "nsmix/integrator.hpp"

namespace nsmix {

NoiseSpec::NoiseSpec(const GalerkinModel& model, NoiseKind kind, double decay_exponent,
                     double modulation, double scale)
    : kind_(kind), s_(decay_exponent), modulation_(modulation), scale_(scale) {
  require(std::isfinite(decay_exponent), ErrorCode::kInvalidArgument,
          "noise: decay exponent must be finite");
  require(std::isfinite(scale) && scale >= 0.0, ErrorCode::kInvalidArgument,
          "noise: scale must be finite and nonnegative");
  if (kind_ == NoiseKind::kConstantDiagonal) modulation_ = 0.0;
  require(std::isfinite(modulation_) && std::abs(modulation_) < 1.0, ErrorCode::kInvalidArgument,
          "noise: modulation amplitude must lie in (-1, 1)");

  const auto mu = model.eigenvalues();
  base_.resize(mu.size());
  for (std::size_t n = 0; n < mu.size(); ++n) base_[n] = scale_ * std::pow(mu[n], -0.5 * s_);

  diag_.epsilon = std::clamp((3.0 - s_) + 0.1, 1e-12, 0.5);
  const double a = std::abs(modulation_);
  const double sup_m = 1.0 + a;
  const double inf_m = 1.0 - a;
  double k2 = 0.0;
  for (std::size_t n = 0; n < mu.size(); ++n) {
    diag_.kappa0 += base_[n] * base_[n] * sup_m * sup_m * std::pow(mu[n], 1.0 + diag_.epsilon);
    // ||eta||_2^2 >= mu_0^2 eta_0^2 bounds the single-coordinate modulation.
    diag_.kappa1 += base_[n] * base_[n] * a * a * mu[n] * mu[n] / (mu[0] * mu[0]);
    if (base_[n] > 0.0) {
      const double r = std::pow(mu[n], -1.5) / (base_[n] * inf_m);
      k2 = std::max(k2, r * r);
    } else {
      k2 = INFINITY;
    }
  }
  diag_.kappa2 = k2;
}

double NoiseSpec::modulation_factor(std::span<const double> x) const {
  if (!is_state_dependent()) return 1.0;
  return 1.0 + modulation_ * std::sin(x[0]);
}

double NoiseSpec::modulation_derivative(std::span<const double> x,
                                        std::span<const double> eta) const {
  if (!is_state_dependent()) return 0.0;
  return modulation_ * std::cos(x[0]) * eta[0];
}

double NoiseSpec::min_amplitude() const {
  const double lo = *std::min_element(base_.begin(), base_.end());
  return lo * (1.0 - std::abs(modulation_));
}

SpectralState apply_phi(const NoiseSpec& spec, const GalerkinModel& model,
                        std::span<const double> x, std::span<const double> w) {
  model.check_conforms(x, "apply_phi");
  model.check_conforms(w, "apply_phi");
  require(spec.size() == model.size(), ErrorCode::kDimensionMismatch,
          "apply_phi: noise spec built for a different model");
  const double m = spec.modulation_factor(x);
  const auto b = spec.base_amplitudes();
  SpectralState out(w.size());
  for (std::size_t n = 0; n < w.size(); ++n) out[n] = b[n] * m * w[n];
  return out;
}

std::vector<double> apply_phi_inverse(const NoiseSpec& spec, const GalerkinModel& model,
                                      std::span<const double> x, std::span<const double> h) {
  model.check_conforms(x, "apply_phi_inverse");
  model.check_conforms(h, "apply_phi_inverse");
  require(spec.size() == model.size(), ErrorCode::kDimensionMismatch,
          "apply_phi_inverse: noise spec built for a different model");
  const double m = spec.modulation_factor(x);
  const auto b = spec.base_amplitudes();
  std::vector<double> out(h.size());
  for (std::size_t n = 0; n < h.size(); ++n) {
    const double phi = b[n] * m;
    if (!(phi > kDegenerateNoiseThreshold)) {
      fail(ErrorCode::kDegenerateNoise,
           "apply_phi_inverse: noise amplitude vanishes on mode " + std::to_string(n));
    }
    out[n] = h[n] / phi;
  }
  return out;
}

SpectralState apply_phi_derivative(const NoiseSpec& spec, const GalerkinModel& model,
                                   std::span<const double> x, std::span<const double> eta,
                                   std::span<const double> w) {
  model.check_conforms(x, "apply_phi_derivative");
  model.check_conforms(eta, "apply_phi_derivative");
  model.check_conforms(w, "apply_phi_derivative");
  const double dm = spec.modulation_derivative(x, eta);
  const auto b = spec.base_amplitudes();
  SpectralState out(w.size());
  for (std::size_t n = 0; n < w.size(); ++n) out[n] = b[n] * dm * w[n];
  return out;
}

std::vector<SpectralState> stochastic_convolution(const GalerkinModel& model,
                                                  const NoiseSpec& spec,
                                                  const TrajectoryRecord& trajectory) {
  require(trajectory.increments.size() + 1 == trajectory.states.size(),
          ErrorCode::kMissingNoiseRecord, "stochastic_convolution: trajectory lacks its noise record");
  const std::size_t d = model.size();
  const double dt = trajectory.dt;
  const auto mu = model.eigenvalues();
  const auto b = spec.base_amplitudes();
  std::vector<double> decay(d);
  for (std::size_t n = 0; n < d; ++n) decay[n] = std::exp(-model.viscosity() * mu[n] * dt);

  std::vector<SpectralState> z;
  z.reserve(trajectory.states.size());
  z.emplace_back(d, 0.0);
  for (std::size_t i = 0; i < trajectory.increments.size(); ++i) {
    const auto& x = trajectory.states[i];
    const auto& dw = trajectory.increments[i];
    const double m = spec.modulation_factor(x);
    SpectralState next(d);
    for (std::size_t n = 0; n < d; ++n) next[n] = decay[n] * (z.back()[n] + b[n] * m * dw[n]);
    z.push_back(std::move(next));
  }
  return z;
}

}  // namespace nsmix
