// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/bel.hpp"

#include <cmath>

#include "nsmix/derivative_flow.hpp"
#include "nsmix/error.hpp"
#include "nsmix/parallel.hpp"
#include "nsmix/stats.hpp"

namespace nsmix {

CutoffValue psi_cutoff(const CutoffSpec& spec, double r) {
  if (spec.is_trivial()) return {1.0, 0.0};
  const double u = r - spec.k0;
  if (u <= 0.0) return {1.0, 0.0};
  if (u >= 1.0) return {0.0, 0.0};
  const double u2 = u * u;
  const double u3 = u2 * u;
  return {1.0 - u3 * (10.0 - 15.0 * u + 6.0 * u2), -30.0 * u2 * (1.0 - 2.0 * u + u2)};
}

Observable Observable::from_name(const std::string& name) {
  Observable g;
  if (name == "constant") {
    g.kind = ObservableKind::kConstant;
  } else if (name == "coordinate") {
    g.kind = ObservableKind::kCoordinate;
  } else if (name == "squared_norm_capped") {
    g.kind = ObservableKind::kSquaredNormCapped;
  } else if (name == "smooth_indicator") {
    g.kind = ObservableKind::kSmoothIndicator;
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown observable '" + name + "'");
  }
  return g;
}

const char* Observable::name() const {
  switch (kind) {
    case ObservableKind::kConstant:
      return "constant";
    case ObservableKind::kCoordinate:
      return "coordinate";
    case ObservableKind::kSquaredNormCapped:
      return "squared_norm_capped";
    case ObservableKind::kSmoothIndicator:
      return "smooth_indicator";
  }
  return "?";
}

double Observable::value(std::span<const double> x) const {
  switch (kind) {
    case ObservableKind::kConstant:
      return 1.0;
    case ObservableKind::kCoordinate:
      return x[index];
    case ObservableKind::kSquaredNormCapped: {
      double r = 0.0;
      for (double v : x) r += v * v;
      return cap * std::tanh(r / cap);
    }
    case ObservableKind::kSmoothIndicator: {
      double r = 0.0;
      for (double v : x) r += v * v;
      return 1.0 / (1.0 + std::exp((r - radius) / width));
    }
  }
  return 0.0;
}

void Observable::gradient(std::span<const double> x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  switch (kind) {
    case ObservableKind::kConstant:
      return;
    case ObservableKind::kCoordinate:
      out[index] = 1.0;
      return;
    case ObservableKind::kSquaredNormCapped: {
      double r = 0.0;
      for (double v : x) r += v * v;
      const double t = std::tanh(r / cap);
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = (1.0 - t * t) * 2.0 * x[i];
      return;
    }
    case ObservableKind::kSmoothIndicator: {
      double r = 0.0;
      for (double v : x) r += v * v;
      const double s = 1.0 / (1.0 + std::exp((r - radius) / width));
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = -s * (1.0 - s) / width * 2.0 * x[i];
      return;
    }
  }
}

BelSample bel_gradient_sample(const GalerkinModel& model, const NoiseSpec& noise,
                              const CutoffSpec& cutoff, const Observable& g,
                              std::span<const double> x0, std::span<const double> h,
                              double horizon, double dt, const RngStream& stream,
                              Scheme scheme) {
  model.check_conforms(x0, "bel_gradient_sample");
  model.check_conforms(h, "bel_gradient_sample");
  require(dt > 0.0 && horizon >= dt, ErrorCode::kInvalidArgument,
          "bel_gradient_sample: need horizon >= dt > 0");
  const double ratio = horizon / dt;
  require(std::abs(ratio - std::round(ratio)) < 1e-9 * ratio, ErrorCode::kInvalidArgument,
          "bel_gradient_sample: horizon must be a multiple of dt");
  const auto n_steps = static_cast<std::size_t>(std::llround(ratio));
  const std::size_t d = model.size();
  const auto mu = model.eigenvalues();
  const auto b = noise.base_amplitudes();

  BelSample s;
  s.sigma = horizon;
  bool all_zero = true;
  for (double v : h) all_zero = all_zero && v == 0.0;

  Stepper stepper(model, noise, scheme, dt);
  RngStream rng = stream;
  SpectralState x(x0.begin(), x0.end());
  SpectralState eta(h.begin(), h.end());
  std::vector<double> dw(d);
  const double threshold = cutoff.k0 + 1.0;

  auto weighted = [&](double t) {
    double a = 0.0;
    for (std::size_t n = 0; n < d; ++n) a += mu[n] * mu[n] * x[n] * eta[n];
    return (1.0 - t / horizon) * a;
  };

  double energy_prev = sobolev_norm_sq(model, 2.0, x);
  double f_prev = weighted(0.0);
  bool stopped = !cutoff.is_trivial() && s.energy_integral >= threshold;
  if (stopped) s.sigma = 0.0;

  for (std::size_t i = 0; i < n_steps; ++i) {
    rng.fill_normal(dw, std::sqrt(dt));
    if (!stopped && !all_zero) {
      const double m = noise.modulation_factor(x);
      for (std::size_t n = 0; n < d; ++n) {
        const double phi = b[n] * m;
        if (!(phi > kDegenerateNoiseThreshold)) {
          fail(ErrorCode::kDegenerateNoise, "bel_gradient_sample: degenerate noise amplitude");
        }
        s.ito_term += eta[n] / phi * dw[n];
      }
    }
    if (!all_zero) tangent_step(stepper, x, dw, eta);
    if (!stepper.advance(x, dw) || !all_finite(eta)) {
      s.censored = true;
      return s;
    }
    const double t = static_cast<double>(i + 1) * dt;
    const double energy = sobolev_norm_sq(model, 2.0, x);
    s.energy_integral += 0.5 * dt * (energy_prev + energy);
    energy_prev = energy;
    const double f = weighted(t);
    if (!stopped) {
      s.drift_term += 0.5 * dt * (f_prev + f);
      if (!cutoff.is_trivial() && s.energy_integral >= threshold) {
        stopped = true;
        s.sigma = t;
        // Past sigma the whole-horizon integral exceeds K0 + 1 too, so
        // psi and psi' vanish and the sample is exactly zero.
        s.psi = 0.0;
        s.dpsi = 0.0;
        return s;
      }
    }
    f_prev = f;
  }

  const CutoffValue psi = psi_cutoff(cutoff, s.energy_integral);
  s.psi = psi.value;
  s.dpsi = psi.derivative;
  s.g_value = g.value(x);
  return s;
}

WeightedObservable truncated_observable(const GalerkinModel& model, const NoiseSpec& noise,
                                        const CutoffSpec& cutoff, const Observable& g,
                                        std::span<const double> x0, double horizon, double dt,
                                        const RngStream& stream, Scheme scheme) {
  model.check_conforms(x0, "truncated_observable");
  const auto n_steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Stepper stepper(model, noise, scheme, dt);
  RngStream rng = stream;
  SpectralState x(x0.begin(), x0.end());
  std::vector<double> dw(model.size());
  double integral = 0.0;
  double prev = sobolev_norm_sq(model, 2.0, x);
  for (std::size_t i = 0; i < n_steps; ++i) {
    if (!stepper.advance(x, rng, dw)) return {0.0, true};
    const double cur = sobolev_norm_sq(model, 2.0, x);
    integral += 0.5 * dt * (prev + cur);
    prev = cur;
    if (!cutoff.is_trivial() && integral >= cutoff.k0 + 1.0) return {0.0, false};
  }
  return {g.value(x) * psi_cutoff(cutoff, integral).value, false};
}

namespace {

Estimate summarize(const std::vector<double>& values, const std::vector<char>& censored) {
  RunningStats stats;
  Estimate e;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (censored[i]) {
      ++e.censored;
    } else {
      stats.push(values[i]);
    }
  }
  e.value = stats.mean();
  e.std_error = stats.std_error();
  e.samples = stats.count();
  return e;
}

}  // namespace

Estimate bel_gradient_mean(const GalerkinModel& model, const NoiseSpec& noise,
                           const CutoffSpec& cutoff, const Observable& g,
                           std::span<const double> x0, std::span<const double> h, double horizon,
                           double dt, std::size_t n_samples, const RngStream& stream) {
  require(n_samples >= 1, ErrorCode::kInvalidArgument, "bel_gradient_mean: need samples");
  std::vector<double> values(n_samples, 0.0);
  std::vector<char> censored(n_samples, 0);
  parallel_for(n_samples, [&](std::size_t i) {
    const BelSample s =
        bel_gradient_sample(model, noise, cutoff, g, x0, h, horizon, dt, stream.child(i));
    censored[i] = s.censored;
    values[i] = s.censored ? 0.0 : s.value(horizon);
  });
  return summarize(values, censored);
}

GradientDifference gradient_difference(const GalerkinModel& model, const NoiseSpec& noise,
                                       const CutoffSpec& cutoff, const Observable& g,
                                       std::span<const double> x1, std::span<const double> x2,
                                       double horizon, double dt, std::size_t n_samples,
                                       int theta_nodes, const RngStream& stream) {
  model.check_conforms(x1, "gradient_difference");
  model.check_conforms(x2, "gradient_difference");
  require(n_samples >= 1, ErrorCode::kInvalidArgument, "gradient_difference: need samples");
  require(theta_nodes >= 1, ErrorCode::kInvalidArgument, "gradient_difference: need nodes");
  const std::size_t d = model.size();
  SpectralState h(d);
  bool same = true;
  for (std::size_t n = 0; n < d; ++n) {
    h[n] = x2[n] - x1[n];
    same = same && h[n] == 0.0;
  }
  GradientDifference out;
  if (same) {
    out.total.samples = n_samples;
    return out;
  }
  const QuadratureRule rule = gauss_legendre(theta_nodes, 1.0, 2.0);
  double var = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double theta = rule.nodes[j];
    SpectralState x(d);
    for (std::size_t n = 0; n < d; ++n) x[n] = (2.0 - theta) * x1[n] + (theta - 1.0) * x2[n];
    const Estimate e =
        bel_gradient_mean(model, noise, cutoff, g, x, h, horizon, dt, n_samples, stream.child(j));
    out.thetas.push_back(theta);
    out.per_node.push_back(e);
    out.total.value += rule.weights[j] * e.value;
    var += rule.weights[j] * rule.weights[j] * e.std_error * e.std_error;
    out.total.samples += e.samples;
    out.total.censored += e.censored;
  }
  out.total.std_error = std::sqrt(var);
  return out;
}

Estimate direct_difference(const GalerkinModel& model, const NoiseSpec& noise,
                           const CutoffSpec& cutoff, const Observable& g,
                           std::span<const double> x1, std::span<const double> x2,
                           double horizon, double dt, std::size_t n_samples,
                           const RngStream& stream) {
  require(n_samples >= 1, ErrorCode::kInvalidArgument, "direct_difference: need samples");
  std::vector<double> values(n_samples, 0.0);
  std::vector<char> censored(n_samples, 0);
  parallel_for(n_samples, [&](std::size_t i) {
    const RngStream s = stream.child(i);
    const WeightedObservable a = truncated_observable(model, noise, cutoff, g, x2, horizon, dt, s);
    const WeightedObservable b = truncated_observable(model, noise, cutoff, g, x1, horizon, dt, s);
    censored[i] = a.censored || b.censored;
    values[i] = a.value - b.value;
  });
  return summarize(values, censored);
}

}  // namespace nsmix
