// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsmix/noise.hpp"
#include "nsmix/rng.hpp"
#include "nsmix/spectral.hpp"

namespace nsmix {

enum class Scheme { kEulerMaruyama, kSemiImplicit };

const char* to_string(Scheme scheme);

// A simulated path with the Brownian increments that produced it.
// states.size() == increments.size() + 1 always holds; on blow-up the record
// is truncated after the last finite state and blew_up is set.
struct TrajectoryRecord {
  double dt = 0.0;
  Scheme scheme = Scheme::kSemiImplicit;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> times;
  std::vector<SpectralState> states;
  std::vector<std::vector<double>> increments;
  bool blew_up = false;

  std::size_t steps() const noexcept { return increments.size(); }
  const SpectralState& final_state() const { return states.back(); }
};

// One-step transition of the Galerkin SDE for a fixed (model, noise, dt).
//   x' = mean(x) + gain_n * phi_n(x) * dW_n
// semi-implicit: mean = e^{-nu mu dt}(x + dt(-B(x) + f)), gain = e^{-nu mu dt}
// Euler-Maruyama: mean = x + dt(-nu A x - B(x) + f),    gain = 1
class Stepper {
 public:
  Stepper(const GalerkinModel& model, const NoiseSpec& noise, Scheme scheme, double dt);

  const GalerkinModel& model() const noexcept { return *model_; }
  const NoiseSpec& noise() const noexcept { return *noise_; }
  Scheme scheme() const noexcept { return scheme_; }
  double dt() const noexcept { return dt_; }
  std::span<const double> gain() const noexcept { return gain_; }

  void mean(std::span<const double> x, std::span<double> out) const;
  // Standard deviation of x'_n given x.
  void std_dev(std::span<const double> x, std::span<double> out) const;
  // In-place step with a given increment; returns false on non-finite output.
  bool advance(std::span<double> x, std::span<const double> dw) const;
  // Draws sqrt(dt) N(0,1) increments from the stream into dw, then advances.
  bool advance(std::span<double> x, RngStream& rng, std::span<double> dw) const;

 private:
  const GalerkinModel* model_;
  const NoiseSpec* noise_;
  Scheme scheme_;
  double dt_;
  double sqrt_dt_;
  std::vector<double> gain_;
  std::vector<double> linear_;  // Euler-Maruyama: 1 - dt nu mu
};

// min(1e-3, 0.1 / (nu mu_max)).
double default_dt(const GalerkinModel& model);

bool all_finite(std::span<const double> x);

SpectralState step(const GalerkinModel& model, const NoiseSpec& noise, Scheme scheme,
                   std::span<const double> x, double dt, std::span<const double> dw);

TrajectoryRecord simulate_path(const GalerkinModel& model, const NoiseSpec& noise,
                               std::span<const double> x0, double horizon, double dt,
                               const RngStream& stream,
                               Scheme scheme = Scheme::kSemiImplicit);

// Re-runs the scheme with prescribed increments (frozen Brownian path).
TrajectoryRecord replay_path(const GalerkinModel& model, const NoiseSpec& noise,
                             std::span<const double> x0, double dt,
                             const std::vector<std::vector<double>>& increments,
                             Scheme scheme = Scheme::kSemiImplicit);

// Sums consecutive increment pairs: the same Brownian path at step 2 dt.
std::vector<std::vector<double>> coarsen_increments(
    const std::vector<std::vector<double>>& increments);

// Index of grid time t; throws kOffGrid when t is not on the grid.
std::size_t grid_index(const TrajectoryRecord& trajectory, double t);

// ||X(t)||^2 + int_0^t ||X(s)||_2^2 ds, trapezoidal.
double h1_energy(const GalerkinModel& model, const TrajectoryRecord& trajectory, double t);

// First grid time at which the running trapezoid of ||X||_2^2 reaches K0 + 1,
// else T.
double sigma_stop(const GalerkinModel& model, const TrajectoryRecord& trajectory, double k0,
                  double horizon);

struct YZDecomposition {
  std::vector<SpectralState> z;
  std::vector<SpectralState> y;               // X - Z pointwise
  std::vector<SpectralState> y_reintegrated;  // dY/dt + nu A Y + B(Y + Z) = f
  double defect = 0.0;                        // max_t |(X - Z) - Y_reintegrated|
};

// The reintegration uses an exponential trapezoidal (Heun) rule, so the
// defect against the first-order driver is O(dt).
YZDecomposition decompose_YZ(const GalerkinModel& model, const NoiseSpec& noise,
                             const TrajectoryRecord& trajectory);

}  // namespace nsmix
