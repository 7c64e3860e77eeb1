// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsmix/error.hpp"
#include "nsmix/parallel.hpp"

namespace nsmix {

namespace {
std::atomic<unsigned> g_workers{0};
}  // namespace

void set_worker_count(unsigned n) { g_workers.store(n); }

unsigned worker_count() {
  const unsigned n = g_workers.load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void RunningStats::push(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double n = na + nb;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

double RunningStats::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::std_error() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  // The bounds are exactly 0 and 1 at the extremes; avoid round-off there.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

Proportion make_proportion(std::size_t successes, std::size_t trials, double z) {
  Proportion out;
  out.successes = successes;
  out.trials = trials;
  if (trials > 0) {
    out.estimate = static_cast<double>(successes) / static_cast<double>(trials);
    out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
  }
  out.wilson = wilson_interval(successes, trials, z);
  return out;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::kDimensionMismatch, "least_squares: size mismatch");
  require(x.size() >= 2, ErrorCode::kInsufficientData, "least_squares: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorCode::kInsufficientData, "least_squares: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A constant series is fitted exactly.
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

QuadratureRule gauss_legendre(int n, double a, double b) {
  require(n >= 1, ErrorCode::kInvalidArgument, "gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const auto un = static_cast<unsigned>(n);
  for (int i = 0; i < n; ++i) {
    // Newton from the Tricomi initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double p = std::legendre(un, x);
      const double pm1 = n > 1 ? std::legendre(un - 1, x) : 1.0;
      dp = n * (x * p - pm1) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double p = std::legendre(un, x);
    const double pm1 = n > 1 ? std::legendre(un - 1, x) : 1.0;
    dp = n * (x * p - pm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto k = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[k] = 0.5 * (b - a) * x + 0.5 * (b + a);
    rule.weights[k] = 0.5 * (b - a) * w;
  }
  return rule;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), ErrorCode::kInsufficientData, "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double q = 0.0;
  if (lambda < 0.2) {
    q = 1.0;
  } else {
    for (int k = 1; k <= 100; ++k) {
      const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
      q += term;
      if (std::abs(term) < 1e-12) break;
    }
    q = std::clamp(q, 0.0, 1.0);
  }
  return {d, q};
}

double batch_means_std_error(std::span<const double> series, std::size_t n_batches) {
  require(n_batches >= 2, ErrorCode::kInvalidArgument, "batch means: need two batches");
  const std::size_t per = series.size() / n_batches;
  require(per >= 1, ErrorCode::kInsufficientData, "batch means: series shorter than batch count");
  RunningStats batches;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += series[i];
    batches.push(s / static_cast<double>(per));
  }
  return batches.std_error();
}

}  // namespace nsmix
