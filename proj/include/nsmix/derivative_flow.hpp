// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "nsmix/integrator.hpp"

namespace nsmix {

// First variation eta(t, s) . h along a recorded trajectory, t >= s.
struct EtaRecord {
  const TrajectoryRecord* base = nullptr;
  std::size_t start_index = 0;
  double start_time = 0.0;
  SpectralState direction;
  // path[j] is eta at grid time start_time + j dt.
  std::vector<SpectralState> path;
  bool blew_up = false;
};

// Discrete tangent of one scheme step at base state x with increment dw:
//   semi-implicit: eta' = e^{-nu mu dt}(eta - dt Btilde(x, eta) + (phi'(x).eta) dW)
//   Euler:         eta' = eta + dt(-nu A eta - Btilde(x, eta)) + (phi'(x).eta) dW
// with Btilde(x, eta) = B(x, eta) + B(eta, x). Updates eta in place.
void tangent_step(const Stepper& stepper, std::span<const double> x, std::span<const double> dw,
                  std::span<double> eta);

EtaRecord evolve_eta(const GalerkinModel& model, const NoiseSpec& noise,
                     const TrajectoryRecord& trajectory, double start_time,
                     std::span<const double> h);

// (X(T, x0 + eps h) - X(T, x0 - eps h)) / (2 eps) with shared increments.
SpectralState fd_directional_derivative(const GalerkinModel& model, const NoiseSpec& noise,
                                        std::span<const double> x0, std::span<const double> h,
                                        double eps, double horizon, double dt,
                                        const RngStream& stream,
                                        Scheme scheme = Scheme::kSemiImplicit);

// Trapezoid of ||eta(t)||_3^2 over [start, sigma].
double eta_h3_budget(const GalerkinModel& model, const EtaRecord& eta, double sigma);

}  // namespace nsmix
