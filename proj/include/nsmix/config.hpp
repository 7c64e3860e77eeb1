// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsmix/bel.hpp"
#include "nsmix/coupling.hpp"
#include "nsmix/noise.hpp"
#include "nsmix/spectral.hpp"

namespace nsmix {

inline constexpr int kConfigSchemaVersion = 1;

struct ModelConfig {
  std::string kind = "shell";  // shell | torus
  int cutoff = 1;
  int shells = 4;
  double mu1 = 1.0;
  double lambda = 2.0;
  double coupling = 1.0;
  double nu = 1.0;
  double forcing_amplitude = 0.1;
  std::vector<std::size_t> forcing_modes{0};
};

struct NoiseConfig {
  std::string kind = "constant";  // constant | modulated
  double s = 2.75;
  double modulation = 0.0;
  double scale = 1.0;
};

// A number a means a * e_0; an array gives every coefficient.
struct InitialState {
  std::optional<double> amplitude;
  std::vector<double> values;

  SpectralState resolve(const GalerkinModel& model) const;
};

struct RunConfig {
  std::size_t n_chains = 1000;
  std::size_t meet_chains = 1000;
  double horizon = 4.0;
  double burn_in = 20.0;
  std::uint64_t seed = 20260101;
  std::string output_dir = "out";
  InitialState x0_1{1.0, {}};
  InitialState x0_2{-1.0, {}};
  Scheme scheme = Scheme::kSemiImplicit;
  double dt = 0.0;  // 0 selects default_dt(model)
  std::size_t n_samples = 1000;
  double sample_interval = 0.0;  // 0 selects the macro step T
  std::vector<double> alphas{0.01, 0.02, 0.05, 0.1};
  std::vector<double> meet_radii_fractions{0.25, 0.5, 1.0};
  std::size_t tv_bins = 20;
  std::size_t record_every = 1;
};

struct BelConfig {
  std::string observable = "coordinate";
  std::size_t index = 0;
  double cap = 1.0;
  double radius = 1.0;
  double width = 0.1;
  std::optional<double> k0;  // absent: no cutoff
  double horizon = 0.5;
  std::size_t n_samples = 4000;
  std::size_t direction = 0;
  double fd_eps = 1e-2;
};

struct SmallNoiseConfig {
  double horizon = 1.0;
  std::vector<double> thresholds{0.3, 0.5, 1.0, 2.0, 4.0};
  std::size_t n_samples = 1000;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  ModelConfig model;
  NoiseConfig noise;
  CouplingParams coupling{4.0, 0.3, 1e-3, 2.0, 20, 0.5, Scheme::kSemiImplicit};
  RunConfig run;
  BelConfig bel;
  SmallNoiseConfig small_noise;

  GalerkinModel build_model() const;
  NoiseSpec build_noise(const GalerkinModel& model) const;
  double step_size(const GalerkinModel& model) const;
  Observable observable() const;
  CutoffSpec cutoff() const;
};

// Parses and validates; every failure is an Error with code kConfig. Unknown
// keys are rejected. A manifest written by a previous run is accepted and its
// embedded configuration is used.
ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

// Applies "dotted.key=value"; the value is parsed as JSON when possible and as
// a string otherwise.
void apply_override(nlohmann::json& document, const std::string& assignment);

nlohmann::json to_json(const ExperimentConfig& config);

// Range checks that need the built model (forcing modes, initial states,
// noise degeneracy). Throws kConfig.
void validate_against_model(const ExperimentConfig& config, const GalerkinModel& model,
                            const NoiseSpec& noise);

}  // namespace nsmix
