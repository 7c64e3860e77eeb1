// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "nsmix/error.hpp"
#include "nsmix/stats.hpp"

namespace nsmix {

void CouplingParams::validate() const {
  require(std::isfinite(horizon) && horizon > 0.0, ErrorCode::kInvalidArgument,
          "coupling: T must be positive");
  require(std::isfinite(dt) && dt > 0.0 && dt <= horizon, ErrorCode::kInvalidArgument,
          "coupling: need 0 < dt <= T");
  const double r = horizon / dt;
  require(std::abs(r - std::round(r)) < 1e-9 * r, ErrorCode::kInvalidArgument,
          "coupling: T must be a multiple of dt");
  require(std::isfinite(delta) && delta > 0.0, ErrorCode::kInvalidArgument,
          "coupling: delta must be positive");
  require(std::isfinite(rho) && rho > 0.0, ErrorCode::kInvalidArgument,
          "coupling: rho must be positive");
  require(std::isfinite(delta_l2) && delta_l2 > 0.0, ErrorCode::kInvalidArgument,
          "coupling: delta_l2 must be positive");
  require(max_macro_steps >= 1, ErrorCode::kInvalidArgument,
          "coupling: max_macro_steps must be >= 1");
}

std::size_t CouplingParams::substeps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

const char* to_string(Branch branch) {
  switch (branch) {
    case Branch::kSynchronous:
      return "synchronous";
    case Branch::kNearMaximal:
      return "near_maximal";
    case Branch::kIndependent:
      return "independent";
  }
  return "?";
}

namespace {

// log density up to the shared -d/2 log(2 pi) constant
double log_density(std::span<const double> z, std::span<const double> mean,
                   std::span<const double> var) {
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = z[i] - mean[i];
    acc += -0.5 * r * r / var[i] - 0.5 * std::log(var[i]);
  }
  return acc;
}

void draw(std::span<const double> mean, std::span<const double> var, RngStream& rng,
          std::vector<double>& out) {
  out.resize(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) out[i] = mean[i] + std::sqrt(var[i]) * rng.normal();
}

}  // namespace

GaussianCoupling maximal_coupling_gaussian(std::span<const double> mean1,
                                           std::span<const double> var1,
                                           std::span<const double> mean2,
                                           std::span<const double> var2, RngStream& rng) {
  const std::size_t d = mean1.size();
  require(var1.size() == d && mean2.size() == d && var2.size() == d,
          ErrorCode::kDimensionMismatch, "maximal_coupling_gaussian: size mismatch");
  for (std::size_t i = 0; i < d; ++i) {
    require(var1[i] > 0.0 && var2[i] > 0.0 && std::isfinite(var1[i]) && std::isfinite(var2[i]),
            ErrorCode::kInvalidArgument,
            "maximal_coupling_gaussian: covariance entries must be positive");
  }
  GaussianCoupling out;
  draw(mean1, var1, rng, out.z1);
  const double log_p = log_density(out.z1, mean1, var1);
  const double log_q = log_density(out.z1, mean2, var2);
  if (std::log(rng.uniform()) <= log_q - log_p) {
    out.z2 = out.z1;
    out.met = true;
    return out;
  }
  // Residual of the second law: accept z' ~ N2 with probability 1 - p/q.
  for (;;) {
    ++out.proposals;
    draw(mean2, var2, rng, out.z2);
    const double lp = log_density(out.z2, mean1, var1);
    const double lq = log_density(out.z2, mean2, var2);
    if (rng.uniform() > std::exp(std::min(0.0, lp - lq))) return out;
  }
}

bool both_in_ball(const GalerkinModel& model, std::span<const double> x1,
                  std::span<const double> x2, double delta) {
  return sobolev_norm_sq(model, 2.0, x1) <= delta && sobolev_norm_sq(model, 2.0, x2) <= delta;
}

namespace {

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

enum StreamTag : std::uint64_t { kFirst = 1, kSecond = 2, kCoupling = 3 };

}  // namespace

MacroStep coupled_macro_step(const GalerkinModel& model, const NoiseSpec& noise,
                             const CouplingParams& params, std::span<const double> x1,
                             std::span<const double> x2, const RngStream& stream) {
  model.check_conforms(x1, "coupled_macro_step");
  model.check_conforms(x2, "coupled_macro_step");
  const std::size_t d = model.size();
  const std::size_t n_sub = params.substeps();
  Stepper stepper(model, noise, params.scheme, params.dt);

  MacroStep out;
  out.x1.assign(x1.begin(), x1.end());
  out.x2.assign(x2.begin(), x2.end());
  RngStream rng1 = stream.child(kFirst);
  std::vector<double> dw(d);

  if (bitwise_equal(x1, x2)) {
    out.branch = Branch::kSynchronous;
    for (std::size_t i = 0; i < n_sub; ++i) {
      if (!stepper.advance(out.x1, rng1, dw)) {
        out.censored = true;
        break;
      }
    }
    out.x2 = out.x1;
    out.met = !out.censored;
    return out;
  }

  if (!both_in_ball(model, x1, x2, params.delta)) {
    out.branch = Branch::kIndependent;
    RngStream rng2 = stream.child(kSecond);
    std::vector<double> dw2(d);
    for (std::size_t i = 0; i < n_sub; ++i) {
      if (!stepper.advance(out.x1, rng1, dw) || !stepper.advance(out.x2, rng2, dw2)) {
        out.censored = true;
        break;
      }
    }
    return out;
  }

  out.branch = Branch::kNearMaximal;
  RngStream rng_c = stream.child(kCoupling);
  std::vector<double> m1(d), m2(d), s1(d), s2(d), v1(d), v2(d);
  const double rho2 = params.rho * params.rho;
  bool equal = false;
  for (std::size_t i = 0; i < n_sub; ++i) {
    if (equal) {
      if (!stepper.advance(out.x1, rng1, dw)) {
        out.censored = true;
        break;
      }
      out.x2 = out.x1;
      continue;
    }
    stepper.mean(out.x1, m1);
    stepper.mean(out.x2, m2);
    stepper.std_dev(out.x1, s1);
    stepper.std_dev(out.x2, s2);
    double mahalanobis2 = 0.0;
    for (std::size_t n = 0; n < d; ++n) {
      v1[n] = s1[n] * s1[n];
      v2[n] = s2[n] * s2[n];
      const double r = m1[n] - m2[n];
      mahalanobis2 += r * r / (0.5 * (v1[n] + v2[n]));
    }
    if (mahalanobis2 <= rho2) {
      ++out.coupling_attempts;
      GaussianCoupling c = maximal_coupling_gaussian(m1, v1, m2, v2, rng_c);
      out.x1 = std::move(c.z1);
      out.x2 = std::move(c.z2);
      equal = c.met;
    } else {
      rng1.fill_normal(dw, std::sqrt(params.dt));
      const bool ok1 = stepper.advance(out.x1, dw);
      const bool ok2 = stepper.advance(out.x2, dw);
      if (!ok1 || !ok2) {
        out.censored = true;
        break;
      }
    }
    if (!all_finite(out.x1) || !all_finite(out.x2)) {
      out.censored = true;
      break;
    }
  }
  out.met = !out.censored && bitwise_equal(out.x1, out.x2);
  return out;
}

CouplingRecord run_coupled_chain(const GalerkinModel& model, const NoiseSpec& noise,
                                 const CouplingParams& params, std::span<const double> x01,
                                 std::span<const double> x02, const RngStream& stream) {
  params.validate();
  model.check_conforms(x01, "run_coupled_chain");
  model.check_conforms(x02, "run_coupled_chain");
  CouplingRecord rec;
  SpectralState x1(x01.begin(), x01.end());
  SpectralState x2(x02.begin(), x02.end());
  rec.states1.push_back(x1);
  rec.states2.push_back(x2);
  if (bitwise_equal(x1, x2)) {
    rec.meeting_step = 0;
    rec.k0 = 0;
  }
  // Index in tau_sequence of the visit preceding each near-branch step; the
  // initial pair counts as visit 0 when it starts inside the ball.
  int visit = both_in_ball(model, x1, x2, params.delta) ? 0 : -1;

  for (int k = 1; k <= params.max_macro_steps; ++k) {
    const MacroStep st = coupled_macro_step(model, noise, params, x1, x2, stream.child(
                                                                            static_cast<std::uint64_t>(k)));
    const bool was_met = rec.meeting_step.has_value();
    if (st.branch == Branch::kNearMaximal) ++rec.attempts;
    x1 = st.x1;
    x2 = st.x2;
    if (st.censored) {
      rec.censored = true;
      break;
    }
    MacroRow row;
    row.step = k;
    row.time = k * params.horizon;
    row.branch = st.branch;
    row.coupling_attempts = st.coupling_attempts;
    double diff = 0.0;
    for (std::size_t n = 0; n < x1.size(); ++n) diff += (x1[n] - x2[n]) * (x1[n] - x2[n]);
    row.diff_l2 = std::sqrt(diff);
    row.met = bitwise_equal(x1, x2);
    row.in_ball = both_in_ball(model, x1, x2, params.delta);
    if (was_met && !row.met) ++rec.persistence_violations;

    if (!was_met && row.met) {
      rec.meeting_step = k;
      if (st.branch == Branch::kNearMaximal && visit >= 0) rec.k0 = visit;
    }
    if (row.in_ball && !rec.tau) rec.tau = row.time;
    if (!rec.tau_l2 && sobolev_norm_sq(model, 0.0, x1) <= params.delta_l2 &&
        sobolev_norm_sq(model, 0.0, x2) <= params.delta_l2) {
      rec.tau_l2 = row.time;
    }
    if (!rec.meeting_step) {
      if (row.in_ball) {
        rec.tau_sequence.push_back(row.time);
        visit = static_cast<int>(rec.tau_sequence.size());
      } else {
        visit = -1;
      }
    }
    rec.rows.push_back(row);
    rec.states1.push_back(x1);
    rec.states2.push_back(x2);
  }
  return rec;
}

ReturnTimeStats return_time_stats(std::span<const double> taus, std::span<const double> alphas,
                                  double macro_step) {
  require(taus.size() >= kMinReturnTimeSamples, ErrorCode::kInsufficientData,
          "return_time_stats: need at least 30 un-censored return times");
  require(macro_step > 0.0, ErrorCode::kInvalidArgument, "return_time_stats: T must be positive");
  ReturnTimeStats out;
  out.samples = taus.size();

  // Survival on the macro grid.
  const double n = static_cast<double>(taus.size());
  const double t_max = *std::max_element(taus.begin(), taus.end());
  const auto k_max = static_cast<int>(std::llround(t_max / macro_step));
  std::vector<double> tx, sy;
  for (int k = 1; k <= k_max; ++k) {
    const double t = k * macro_step;
    const auto above = static_cast<std::size_t>(std::count_if(
        taus.begin(), taus.end(), [&](double v) { return v > t + 1e-9 * macro_step; }));
    if (above < kTailMinCount) break;
    tx.push_back(t);
    sy.push_back(static_cast<double>(above) / n);
  }
  const bool have_tail = tx.size() >= 2;
  if (have_tail) {
    const LinearFit lf = [&] {
      std::vector<double> ly(sy.size());
      for (std::size_t i = 0; i < sy.size(); ++i) ly[i] = std::log(sy[i]);
      return least_squares(tx, ly);
    }();
    out.tail.x = tx;
    out.tail.p = sy;
    out.tail.c = std::exp(lf.intercept);
    out.tail.gamma = -lf.slope;
    out.tail.r_squared = lf.r_squared;
    out.tail.points_used = tx.size();
  }

  for (double alpha : alphas) {
    MomentEstimate m;
    m.alpha = alpha;
    RunningStats half, full;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const double v = std::exp(alpha * taus[i]);
      full.push(v);
      if (i < taus.size() / 2) half.push(v);
    }
    m.mean = full.mean();
    m.std_error = full.std_error();
    m.cauchy_stable = std::isfinite(m.mean) &&
                      std::abs(half.mean() - full.mean()) <= kCauchyTolerance * std::abs(full.mean());
    // Without enough tail points every return happened within one or two
    // macro steps, so the tail is lighter than any rate we could resolve.
    m.tail_finite = !have_tail || alpha < out.tail.gamma;
    m.diverging = !m.tail_finite;
    out.moments.push_back(m);
  }
  return out;
}

ReturnTimeStats return_time_stats(std::span<const CouplingRecord> records,
                                  std::span<const double> alphas, double macro_step) {
  std::vector<double> taus;
  for (const auto& r : records) {
    if (!r.censored && r.tau) taus.push_back(*r.tau);
  }
  return return_time_stats(taus, alphas, macro_step);
}

}  // namespace nsmix
