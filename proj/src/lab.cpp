// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/lab.hpp"

#include <algorithm>
#include <cmath>

#include "nsmix/error.hpp"
#include "nsmix/parallel.hpp"

namespace nsmix {

DecayFit fit_exponential_decay(std::span<const double> x, std::span<const double> p) {
  require(x.size() == p.size(), ErrorCode::kDimensionMismatch,
          "fit_exponential_decay: size mismatch");
  DecayFit fit;
  fit.x.assign(x.begin(), x.end());
  fit.p.assign(p.begin(), p.end());
  std::vector<double> xs, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (p[i] > 0.0 && std::isfinite(p[i])) {
      xs.push_back(x[i]);
      ly.push_back(std::log(p[i]));
    } else {
      ++fit.censored;
    }
  }
  require(xs.size() >= 4, ErrorCode::kInsufficientData,
          "fit_exponential_decay: need at least 4 positive points");
  const LinearFit lf = least_squares(xs, ly);
  fit.c = std::exp(lf.intercept);
  fit.gamma = -lf.slope;
  fit.r_squared = lf.r_squared;
  fit.points_used = xs.size();
  return fit;
}

SpectralState sample_h2_ball(const GalerkinModel& model, double radius, RngStream& rng) {
  const std::size_t d = model.size();
  std::vector<double> y(d);
  double norm = 0.0;
  do {
    rng.fill_normal(y);
    norm = 0.0;
    for (double v : y) norm += v * v;
  } while (norm == 0.0);
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) / std::sqrt(norm);
  const auto mu = model.eigenvalues();
  SpectralState x(d);
  for (std::size_t n = 0; n < d; ++n) x[n] = r * y[n] / mu[n];
  return x;
}

MeetProbability estimate_meet_probability(const GalerkinModel& model, const NoiseSpec& noise,
                                          const CouplingParams& params, double ball_radius,
                                          std::size_t n_chains, const RngStream& stream) {
  params.validate();
  require(n_chains >= 100, ErrorCode::kInvalidArgument,
          "estimate_meet_probability: need at least 100 chains");
  require(ball_radius >= 0.0 && std::isfinite(ball_radius), ErrorCode::kInvalidArgument,
          "estimate_meet_probability: radius must be nonnegative");
  std::vector<char> met(n_chains, 0), censored(n_chains, 0);
  parallel_for(n_chains, [&](std::size_t i) {
    const RngStream s = stream.child(i);
    RngStream init = s.child(0);
    const SpectralState x1 = sample_h2_ball(model, ball_radius, init);
    const SpectralState x2 = sample_h2_ball(model, ball_radius, init);
    const MacroStep st = coupled_macro_step(model, noise, params, x1, x2, s.child(1));
    met[i] = st.met;
    censored[i] = st.censored;
  });
  MeetProbability out;
  std::size_t successes = 0, trials = 0;
  for (std::size_t i = 0; i < n_chains; ++i) {
    if (censored[i]) {
      ++out.censored;
      continue;
    }
    ++trials;
    successes += met[i] ? 1 : 0;
  }
  require(trials >= 100, ErrorCode::kInsufficientData,
          "estimate_meet_probability: fewer than 100 un-censored chains");
  out.met = make_proportion(successes, trials);
  return out;
}

EmpiricalMeasure estimate_invariant_measure(const GalerkinModel& model, const NoiseSpec& noise,
                                            std::span<const double> x0,
                                            const InvariantRunParams& params,
                                            const RngStream& stream) {
  model.check_conforms(x0, "estimate_invariant_measure");
  require(params.burn_in >= 0.0, ErrorCode::kInvalidArgument,
          "estimate_invariant_measure: burn_in must be nonnegative");
  require(params.n_samples >= params.batches && params.batches >= 2, ErrorCode::kInvalidArgument,
          "estimate_invariant_measure: need at least one sample per batch");
  require(params.sample_interval >= params.dt && params.dt > 0.0, ErrorCode::kInvalidArgument,
          "estimate_invariant_measure: sample interval must be at least dt");
  const std::size_t d = model.size();
  Stepper stepper(model, noise, params.scheme, params.dt);
  RngStream rng = stream;
  SpectralState x(x0.begin(), x0.end());
  std::vector<double> dw(d);
  EmpiricalMeasure out;

  auto run_for = [&](double duration) {
    const auto n = static_cast<std::size_t>(std::llround(duration / params.dt));
    for (std::size_t i = 0; i < n; ++i) {
      if (!stepper.advance(x, rng, dw)) return false;
    }
    return true;
  };

  if (!run_for(params.burn_in)) {
    out.censored = true;
    return out;
  }
  std::vector<double> l2, h1;
  std::vector<std::vector<double>> modes(d);
  for (std::size_t k = 0; k < params.n_samples; ++k) {
    if (!run_for(params.sample_interval)) {
      out.censored = true;
      break;
    }
    out.samples.push_back(x);
    l2.push_back(sobolev_norm_sq(model, 0.0, x));
    h1.push_back(sobolev_norm_sq(model, 1.0, x));
    for (std::size_t n = 0; n < d; ++n) modes[n].push_back(x[n] * x[n]);
  }
  if (out.samples.size() < params.batches) return out;
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s += a;
    return s / static_cast<double>(v.size());
  };
  out.mean_l2_sq = mean(l2);
  out.mean_h1_sq = mean(h1);
  out.se_l2_sq = batch_means_std_error(l2, params.batches);
  out.se_h1_sq = batch_means_std_error(h1, params.batches);
  for (std::size_t n = 0; n < d; ++n) {
    out.mode_second_moments.push_back(mean(modes[n]));
    out.mode_second_moment_se.push_back(batch_means_std_error(modes[n], params.batches));
  }
  return out;
}

SmallNoiseResult small_noise_probability(const GalerkinModel& model, const NoiseSpec& noise,
                                         std::span<const double> x0, double horizon, double dt,
                                         std::span<const double> thresholds,
                                         std::size_t n_samples, const RngStream& stream) {
  model.check_conforms(x0, "small_noise_probability");
  for (double m : thresholds) {
    require(m > 0.0, ErrorCode::kInvalidArgument, "small_noise_probability: M must be positive");
  }
  require(n_samples >= 1, ErrorCode::kInvalidArgument, "small_noise_probability: need samples");
  const std::size_t d = model.size();
  const auto n_steps = static_cast<std::size_t>(std::llround(horizon / dt));
  std::vector<double> sup(n_samples, 0.0);
  std::vector<char> censored(n_samples, 0);
  parallel_for(n_samples, [&](std::size_t i) {
    Stepper stepper(model, noise, Scheme::kSemiImplicit, dt);
    RngStream rng = stream.child(i);
    SpectralState x(x0.begin(), x0.end());
    SpectralState z(d, 0.0);
    std::vector<double> dw(d);
    const auto gain = stepper.gain();
    const auto b = noise.base_amplitudes();
    double best = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
      rng.fill_normal(dw, std::sqrt(dt));
      const double m = noise.modulation_factor(x);
      for (std::size_t n = 0; n < d; ++n) z[n] = gain[n] * (z[n] + b[n] * m * dw[n]);
      if (!stepper.advance(x, dw)) {
        censored[i] = 1;
        return;
      }
      best = std::max(best, sobolev_norm_sq(model, 2.0, z));
    }
    sup[i] = best;
  });
  SmallNoiseResult out;
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (censored[i]) {
      ++out.censored;
    } else {
      out.sup_values.push_back(sup[i]);
    }
  }
  for (double m : thresholds) {
    const auto hits = static_cast<std::size_t>(std::count_if(
        out.sup_values.begin(), out.sup_values.end(), [&](double v) { return v <= m; }));
    out.estimates.push_back(make_proportion(hits, out.sup_values.size()));
  }
  return out;
}

MixingResult mixing_experiment(const GalerkinModel& model, const NoiseSpec& noise,
                               const MixingParams& params, const RngStream& stream) {
  params.coupling.validate();
  model.check_conforms(params.x01, "mixing_experiment");
  model.check_conforms(params.x02, "mixing_experiment");
  require(params.n_chains >= 1, ErrorCode::kInvalidArgument, "mixing_experiment: need chains");
  require(noise.min_amplitude() > 0.0, ErrorCode::kDegenerateNoise,
          "mixing_experiment: noise must be non-degenerate");

  MixingResult out;
  out.records.resize(params.n_chains);
  const RngStream chains = stream.child(1);
  parallel_for(params.n_chains, [&](std::size_t i) {
    out.records[i] =
        run_coupled_chain(model, noise, params.coupling, params.x01, params.x02, chains.child(i));
  });

  std::vector<const CouplingRecord*> ok;
  for (const auto& r : out.records) {
    out.persistence_violations += r.persistence_violations;
    if (r.censored) {
      ++out.censored;
    } else {
      ok.push_back(&r);
    }
  }
  if (static_cast<double>(out.censored) >
      params.max_censored_fraction * static_cast<double>(params.n_chains)) {
    fail(ErrorCode::kCensoringOverflow,
         "mixing_experiment: " + std::to_string(out.censored) + " of " +
             std::to_string(params.n_chains) + " chains censored");
  }
  require(!ok.empty(), ErrorCode::kInsufficientData, "mixing_experiment: every chain censored");

  const int n_max = params.coupling.max_macro_steps;
  const double total = static_cast<double>(ok.size());
  for (int n = 1; n <= n_max; ++n) {
    std::size_t unmet = 0;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto* r : ok) {
      if (!(r->meeting_step && *r->meeting_step <= n)) ++unmet;
      lo = std::min({lo, r->states1[static_cast<std::size_t>(n)][0],
                     r->states2[static_cast<std::size_t>(n)][0]});
      hi = std::max({hi, r->states1[static_cast<std::size_t>(n)][0],
                     r->states2[static_cast<std::size_t>(n)][0]});
    }
    const double p = static_cast<double>(unmet) / total;
    out.steps.push_back(n);
    out.times.push_back(n * params.coupling.horizon);
    out.p_unmet.push_back(p);
    out.p_unmet_se.push_back(std::sqrt(p * (1.0 - p) / total));

    std::vector<double> h1(params.tv_bins, 0.0), h2(params.tv_bins, 0.0);
    const double width = hi > lo ? (hi - lo) / static_cast<double>(params.tv_bins) : 1.0;
    auto bin = [&](double v) {
      const auto b = static_cast<std::size_t>((v - lo) / width);
      return std::min(b, params.tv_bins - 1);
    };
    for (const auto* r : ok) {
      h1[bin(r->states1[static_cast<std::size_t>(n)][0])] += 1.0;
      h2[bin(r->states2[static_cast<std::size_t>(n)][0])] += 1.0;
    }
    double tv = 0.0;
    for (std::size_t b = 0; b < params.tv_bins; ++b) tv += std::abs(h1[b] - h2[b]);
    out.tv_hist.push_back(0.5 * tv / total);
  }
  try {
    out.decay = fit_exponential_decay(out.times, out.p_unmet);
  } catch (const Error&) {
    out.decay.x = out.times;
    out.decay.p = out.p_unmet;
  }

  std::size_t max_visits = 0;
  for (const auto* r : ok) {
    if (r->meeting_step) out.meet_steps.push_back(static_cast<std::size_t>(*r->meeting_step));
    if (r->tau) out.taus.push_back(*r->tau);
    if (r->k0) out.k0s.push_back(*r->k0);
    out.attempts += static_cast<std::size_t>(r->attempts);
    if (r->meeting_step && r->k0 && *r->meeting_step > 0) ++out.attempt_successes;
    max_visits = std::max(max_visits, r->tau_sequence.size());
  }
  out.attempt_rate = make_proportion(out.attempt_successes, out.attempts);

  // P(k0 > n): chains whose status is known at n (met, or unmet with at least
  // n failed ball visits).
  for (std::size_t n = 0; n <= max_visits; ++n) {
    std::size_t known = 0, above = 0;
    for (const auto* r : ok) {
      if (r->k0) {
        ++known;
        if (static_cast<std::size_t>(*r->k0) > n) ++above;
      } else if (r->unmet() && r->tau_sequence.size() >= n) {
        ++known;
        ++above;
      }
    }
    if (known == 0) break;
    out.k0_known.push_back(known);
    out.k0_survival.push_back(static_cast<double>(above) / static_cast<double>(known));
  }

  if (!params.alphas.empty() && out.taus.size() >= kMinReturnTimeSamples) {
    out.return_times = return_time_stats(out.taus, params.alphas, params.coupling.horizon);
    out.have_return_times = true;
  }

  out.invariant =
      estimate_invariant_measure(model, noise, params.x01, params.invariant, stream.child(2));
  return out;
}

}  // namespace nsmix
