// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nsmix/integrator.hpp"

namespace nsmix {

// Smooth cutoff psi: 1 on (-inf, K0], 0 on [K0 + 1, inf), quintic smoothstep
// in between. K0 = +inf gives psi == 1, psi' == 0.
struct CutoffSpec {
  double k0 = std::numeric_limits<double>::infinity();

  bool is_trivial() const noexcept { return k0 == std::numeric_limits<double>::infinity(); }
};

struct CutoffValue {
  double value;
  double derivative;
};

CutoffValue psi_cutoff(const CutoffSpec& spec, double r);

enum class ObservableKind { kConstant, kCoordinate, kSquaredNormCapped, kSmoothIndicator };

// Registry of test functions g:
//   constant               g(x) = 1
//   coordinate             g(x) = x_i                               (index)
//   squared_norm_capped    g(x) = c tanh(|x|^2 / c)                 (cap c)
//   smooth_indicator       g(x) = 1 / (1 + exp((|x|^2 - r) / w))    (radius r, width w)
struct Observable {
  ObservableKind kind = ObservableKind::kCoordinate;
  std::size_t index = 0;
  double cap = 1.0;
  double radius = 1.0;
  double width = 0.1;

  static Observable from_name(const std::string& name);
  const char* name() const;
  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
};

struct BelSample {
  double g_value = 0.0;
  double psi = 1.0;
  double dpsi = 0.0;
  double ito_term = 0.0;    // sum_{t_i < sigma} (phi^-1(X_i) eta_i, dW_i)
  double drift_term = 0.0;  // trapezoid of (1 - t/T)(A X, A eta) over [0, sigma]
  double sigma = 0.0;
  double energy_integral = 0.0;  // trapezoid of ||X||_2^2 over [0, T]
  bool censored = false;

  // g(X(T)) (psi / T * ito_term + 2 psi' drift_term)
  double value(double horizon) const {
    return g_value * (psi / horizon * ito_term + 2.0 * dpsi * drift_term);
  }
  double ito_part(double horizon) const { return g_value * psi / horizon * ito_term; }
  double drift_part() const { return 2.0 * g_value * dpsi * drift_term; }
};

BelSample bel_gradient_sample(const GalerkinModel& model, const NoiseSpec& noise,
                              const CutoffSpec& cutoff, const Observable& g,
                              std::span<const double> x0, std::span<const double> h,
                              double horizon, double dt, const RngStream& stream,
                              Scheme scheme = Scheme::kSemiImplicit);

// g(X(T)) psi_X for one path.
struct WeightedObservable {
  double value = 0.0;
  bool censored = false;
};

WeightedObservable truncated_observable(const GalerkinModel& model, const NoiseSpec& noise,
                                        const CutoffSpec& cutoff, const Observable& g,
                                        std::span<const double> x0, double horizon, double dt,
                                        const RngStream& stream,
                                        Scheme scheme = Scheme::kSemiImplicit);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::size_t censored = 0;
};

// Monte Carlo mean of bel_gradient_sample over independent child streams.
Estimate bel_gradient_mean(const GalerkinModel& model, const NoiseSpec& noise,
                           const CutoffSpec& cutoff, const Observable& g,
                           std::span<const double> x0, std::span<const double> h, double horizon,
                           double dt, std::size_t n_samples, const RngStream& stream);

struct GradientDifference {
  Estimate total;
  std::vector<double> thetas;
  std::vector<Estimate> per_node;  // J_theta estimates
};

// Gauss-Legendre over theta in [1, 2] of J_theta at x0^theta = (2 - theta) x1 + (theta - 1) x2,
// h = x2 - x1; reconstructs E[g psi](x2) - E[g psi](x1).
GradientDifference gradient_difference(const GalerkinModel& model, const NoiseSpec& noise,
                                       const CutoffSpec& cutoff, const Observable& g,
                                       std::span<const double> x1, std::span<const double> x2,
                                       double horizon, double dt, std::size_t n_samples,
                                       int theta_nodes, const RngStream& stream);

// Common-random-number estimate of E[g(X(T,x2)) psi] - E[g(X(T,x1)) psi].
Estimate direct_difference(const GalerkinModel& model, const NoiseSpec& noise,
                           const CutoffSpec& cutoff, const Observable& g,
                           std::span<const double> x1, std::span<const double> x2,
                           double horizon, double dt, std::size_t n_samples,
                           const RngStream& stream);

}  // namespace nsmix
