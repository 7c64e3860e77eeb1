// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nsmix {

// p(x) ~ C exp(-gamma x), fitted by least squares on (x, log p) over the
// strictly positive points.
struct DecayFit {
  std::vector<double> x;
  std::vector<double> p;
  double c = 0.0;
  double gamma = 0.0;
  double r_squared = 0.0;
  std::size_t points_used = 0;
  std::size_t censored = 0;
};

DecayFit fit_exponential_decay(std::span<const double> x, std::span<const double> p);

}  // namespace nsmix
