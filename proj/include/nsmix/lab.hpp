// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nsmix/coupling.hpp"
#include "nsmix/decay_fit.hpp"
#include "nsmix/integrator.hpp"
#include "nsmix/stats.hpp"

namespace nsmix {

// Uniform sample from the H_2 ball ||x||_2 <= radius.
SpectralState sample_h2_ball(const GalerkinModel& model, double radius, RngStream& rng);

struct MeetProbability {
  Proportion met;
  std::size_t censored = 0;
};

// Pairs drawn i.i.d. uniformly in the H_2 ball of the given radius; one
// coupled macro step each; fraction that meet.
MeetProbability estimate_meet_probability(const GalerkinModel& model, const NoiseSpec& noise,
                                          const CouplingParams& params, double ball_radius,
                                          std::size_t n_chains, const RngStream& stream);

struct EmpiricalMeasure {
  std::vector<SpectralState> samples;
  double mean_l2_sq = 0.0;  // mean |x|^2
  double se_l2_sq = 0.0;
  double mean_h1_sq = 0.0;  // mean ||x||^2
  double se_h1_sq = 0.0;
  std::vector<double> mode_second_moments;
  std::vector<double> mode_second_moment_se;
  bool censored = false;
};

struct InvariantRunParams {
  double burn_in = 1.0;
  std::size_t n_samples = 1000;
  double sample_interval = 0.5;
  double dt = 1e-3;
  std::size_t batches = 20;  // batch means for the standard errors
  Scheme scheme = Scheme::kSemiImplicit;
};

// Time-averaged occupation measure of one long run sampled every
// sample_interval after burn_in.
EmpiricalMeasure estimate_invariant_measure(const GalerkinModel& model, const NoiseSpec& noise,
                                            std::span<const double> x0,
                                            const InvariantRunParams& params,
                                            const RngStream& stream);

struct SmallNoiseResult {
  std::vector<double> thresholds;
  std::vector<Proportion> estimates;  // P(sup_t ||Z(t)||_2^2 <= M) per threshold
  std::vector<double> sup_values;     // per path
  std::size_t censored = 0;
};

SmallNoiseResult small_noise_probability(const GalerkinModel& model, const NoiseSpec& noise,
                                         std::span<const double> x0, double horizon, double dt,
                                         std::span<const double> thresholds,
                                         std::size_t n_samples, const RngStream& stream);

struct MixingParams {
  CouplingParams coupling;
  SpectralState x01;
  SpectralState x02;
  std::size_t n_chains = 1000;
  std::vector<double> alphas;
  InvariantRunParams invariant;
  std::size_t tv_bins = 20;
  double max_censored_fraction = 0.1;
};

struct MixingResult {
  std::vector<double> steps;       // n = 1..max
  std::vector<double> times;       // n T
  std::vector<double> p_unmet;     // P(X1(nT) != X2(nT))
  std::vector<double> p_unmet_se;
  std::vector<double> tv_hist;     // histogram TV of X1(nT)_0 vs X2(nT)_0
  DecayFit decay;                  // fitted against time nT
  std::vector<std::size_t> meet_steps;
  std::vector<double> taus;
  std::vector<int> k0s;
  std::size_t attempts = 0;
  std::size_t attempt_successes = 0;
  Proportion attempt_rate;
  std::vector<double> k0_survival;  // P(k0 > n), n = 0 ..
  std::vector<std::size_t> k0_known;
  ReturnTimeStats return_times;
  bool have_return_times = false;
  EmpiricalMeasure invariant;
  std::size_t censored = 0;
  int persistence_violations = 0;
  std::vector<CouplingRecord> records;
};

MixingResult mixing_experiment(const GalerkinModel& model, const NoiseSpec& noise,
                               const MixingParams& params, const RngStream& stream);

}  // namespace nsmix
