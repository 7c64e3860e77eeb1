// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "nsmix/spectral.hpp"

namespace nsmix {

enum class NoiseKind { kConstantDiagonal, kModulatedDiagonal };

struct NoiseDiagnostics {
  double epsilon = 0.0;
  double kappa0 = 0.0;  // sum_n sup_x phi_n(x)^2 mu_n^(1+eps)
  double kappa1 = 0.0;  // sup sum_n |phi_n'(x).eta|^2 mu_n^2 / ||eta||_2^2
  double kappa2 = 0.0;  // sup_x |phi^-1(x)|^2 in L(H_3; H)
};

// Diagonal noise phi(x) dW = sum_n phi_n(x) e_n dW_n with
//   phi_n(x) = scale * mu_n^(-s/2) * m(x),
// where m == 1 for the constant kind and m(x) = 1 + a sin(x_0) for the
// modulated kind (|a| < 1 keeps every phi_n strictly positive).
class NoiseSpec {
 public:
  NoiseSpec(const GalerkinModel& model, NoiseKind kind, double decay_exponent,
            double modulation = 0.5, double scale = 1.0);

  static NoiseSpec constant(const GalerkinModel& model, double decay_exponent = 3.0,
                            double scale = 1.0) {
    return NoiseSpec(model, NoiseKind::kConstantDiagonal, decay_exponent, 0.0, scale);
  }

  NoiseKind kind() const noexcept { return kind_; }
  double decay_exponent() const noexcept { return s_; }
  double modulation() const noexcept { return modulation_; }
  double scale() const noexcept { return scale_; }
  std::size_t size() const noexcept { return base_.size(); }
  std::span<const double> base_amplitudes() const noexcept { return base_; }
  const NoiseDiagnostics& diagnostics() const noexcept { return diag_; }

  // m(x); identically 1 for constant noise.
  double modulation_factor(std::span<const double> x) const;
  // Directional derivative m'(x).eta.
  double modulation_derivative(std::span<const double> x, std::span<const double> eta) const;
  double amplitude(std::size_t n, std::span<const double> x) const {
    return base_[n] * modulation_factor(x);
  }
  // Smallest base amplitude times the modulation lower bound.
  double min_amplitude() const;
  bool is_state_dependent() const noexcept {
    return kind_ == NoiseKind::kModulatedDiagonal && modulation_ != 0.0;
  }

 private:
  NoiseKind kind_;
  double s_;
  double modulation_;
  double scale_;
  std::vector<double> base_;
  NoiseDiagnostics diag_;
};

// Underflow threshold for apply_phi_inverse.
inline constexpr double kDegenerateNoiseThreshold = 1e-300;

SpectralState apply_phi(const NoiseSpec& spec, const GalerkinModel& model,
                        std::span<const double> x, std::span<const double> w);
std::vector<double> apply_phi_inverse(const NoiseSpec& spec, const GalerkinModel& model,
                                      std::span<const double> x, std::span<const double> h);
SpectralState apply_phi_derivative(const NoiseSpec& spec, const GalerkinModel& model,
                                   std::span<const double> x, std::span<const double> eta,
                                   std::span<const double> w);

struct TrajectoryRecord;

// Z(t) = int_0^t exp(-nu A (t-s)) phi(X(s)) dW(s) on the record's grid, by
// Z_n(t+dt) = e^{-nu mu_n dt} (Z_n(t) + phi_n(X(t)) dW_n).
std::vector<SpectralState> stochastic_convolution(const GalerkinModel& model,
                                                  const NoiseSpec& spec,
                                                  const TrajectoryRecord& trajectory);

}  // namespace nsmix
