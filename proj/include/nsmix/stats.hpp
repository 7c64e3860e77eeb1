// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nsmix {

// Count/mean/M2 accumulator (Welford) with an associative merge.
class RunningStats {
 public:
  void push(double x);
  void merge(const RunningStats& other);

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;  // unbiased sample variance
  double std_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Proportion {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  Interval wilson;  // 95% Wilson score interval
};

Proportion make_proportion(std::size_t successes, std::size_t trials, double z = 1.959963984540054);
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y = a + b x. Requires at least two distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
// distribution (Stephens' small-sample correction).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Standard error of the mean of a correlated series by non-overlapping batch
// means.
double batch_means_std_error(std::span<const double> series, std::size_t n_batches = 20);

}  // namespace nsmix
