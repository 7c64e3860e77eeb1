// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nsmix/decay_fit.hpp"
#include "nsmix/integrator.hpp"

namespace nsmix {

struct CouplingParams {
  double horizon = 0.5;   // macro step T
  double delta = 1.0;     // H_2 ball: ||x||_2^2 <= delta
  double dt = 1e-3;       // substep
  double rho = 1.0;       // proximity threshold in substep-kernel standard deviations
  int max_macro_steps = 20;
  double delta_l2 = 1.0;  // L^2 ball for tau_L2: |x|^2 <= delta_l2
  Scheme scheme = Scheme::kSemiImplicit;

  void validate() const;
  std::size_t substeps() const;
};

enum class Branch : std::uint8_t { kSynchronous, kNearMaximal, kIndependent };

const char* to_string(Branch branch);

struct GaussianCoupling {
  std::vector<double> z1;
  std::vector<double> z2;
  bool met = false;
  int proposals = 0;  // draws from the second law on rejection
};

// Maximal coupling of N(mean1, diag var1) and N(mean2, diag var2): both
// marginals are exact and P(z1 == z2) = 1 - TV.
GaussianCoupling maximal_coupling_gaussian(std::span<const double> mean1,
                                           std::span<const double> var1,
                                           std::span<const double> mean2,
                                           std::span<const double> var2, RngStream& rng);

struct MacroStep {
  SpectralState x1;
  SpectralState x2;
  Branch branch = Branch::kSynchronous;
  bool met = false;
  bool censored = false;
  int coupling_attempts = 0;
};

// Both states are in the H_2 ball ||x||_2^2 <= delta.
bool both_in_ball(const GalerkinModel& model, std::span<const double> x1,
                  std::span<const double> x2, double delta);

// One macro step of the paired chain. Branch by case:
//   x1 == x2                -> synchronous (one path, copied)
//   both in the delta-ball  -> near: substeps share increments until the two
//                              substep kernels are within rho standard
//                              deviations, then the kernels are maximally
//                              coupled
//   otherwise               -> independent streams
MacroStep coupled_macro_step(const GalerkinModel& model, const NoiseSpec& noise,
                             const CouplingParams& params, std::span<const double> x1,
                             std::span<const double> x2, const RngStream& stream);

struct MacroRow {
  int step = 0;  // grid index k; the row describes time k T
  double time = 0.0;
  Branch branch = Branch::kSynchronous;  // branch used to reach this time
  double diff_l2 = 0.0;
  bool met = false;
  bool in_ball = false;
  int coupling_attempts = 0;
};

struct CouplingRecord {
  std::vector<MacroRow> rows;             // k = 1 .. max_macro_steps
  std::vector<SpectralState> states1;     // k = 0 .. max_macro_steps
  std::vector<SpectralState> states2;
  std::optional<int> meeting_step;        // first k with X1(kT) == X2(kT)
  std::optional<double> tau;              // first k >= 1 in the H_2 ball, as time
  std::optional<double> tau_l2;           // first k >= 1 in the L^2 ball, as time
  std::vector<double> tau_sequence;       // successive ball visits before meeting
  std::optional<int> k0;                  // attempts index of the successful meet
  int attempts = 0;                       // near-branch macro steps taken
  bool censored = false;
  int persistence_violations = 0;
  bool unmet() const { return !meeting_step.has_value(); }
};

CouplingRecord run_coupled_chain(const GalerkinModel& model, const NoiseSpec& noise,
                                 const CouplingParams& params, std::span<const double> x01,
                                 std::span<const double> x02, const RngStream& stream);

struct MomentEstimate {
  double alpha = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  bool cauchy_stable = false;  // running mean at n/2 and n agree within tolerance
  bool tail_finite = false;    // alpha below the fitted tail rate
  bool diverging = true;       // !tail_finite
};

struct ReturnTimeStats {
  std::size_t samples = 0;
  std::vector<MomentEstimate> moments;
  DecayFit tail;  // P(tau > t) ~ C exp(-gamma t)
};

inline constexpr std::size_t kMinReturnTimeSamples = 30;
inline constexpr double kCauchyTolerance = 0.1;
inline constexpr std::size_t kTailMinCount = 10;

ReturnTimeStats return_time_stats(std::span<const double> taus, std::span<const double> alphas,
                                  double macro_step);
ReturnTimeStats return_time_stats(std::span<const CouplingRecord> records,
                                  std::span<const double> alphas, double macro_step);

}  // namespace nsmix
