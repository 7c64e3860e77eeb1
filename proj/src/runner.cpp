// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <thread>

#include "nsmix/bel.hpp"
#include "nsmix/config.hpp"
#include "nsmix/error.hpp"
#include "nsmix/lab.hpp"
#include "nsmix/parallel.hpp"
#include "nsmix/serialize.hpp"

namespace nsmix {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Top-level stream tags, one per experiment family.
enum : std::uint64_t {
  kSimulateStream = 1,
  kCoupleStream = 2,
  kMixStream = 3,
  kMeetStream = 4,
  kBelStream = 5,
  kInvariantStream = 6,
  kSmallNoiseStream = 7,
};

struct Context {
  ExperimentConfig config;
  GalerkinModel model;
  NoiseSpec noise;
  double dt;
  fs::path dir;
  RngStream root;
  std::vector<std::string> files;

  std::string path(const std::string& name) {
    files.push_back(name);
    return (dir / name).string();
  }
};

json proportion_json(const Proportion& p) {
  return {{"estimate", p.estimate},
          {"successes", p.successes},
          {"trials", p.trials},
          {"std_error", p.std_error},
          {"wilson_lo", p.wilson.lo},
          {"wilson_hi", p.wilson.hi}};
}

json decay_json(const DecayFit& f) {
  return {{"c", f.c},
          {"gamma", f.gamma},
          {"r_squared", f.r_squared},
          {"points_used", f.points_used},
          {"censored", f.censored}};
}

json measure_json(const EmpiricalMeasure& m) {
  return {{"samples", m.samples.size()},  {"mean_l2_sq", m.mean_l2_sq},
          {"se_l2_sq", m.se_l2_sq},       {"mean_h1_sq", m.mean_h1_sq},
          {"se_h1_sq", m.se_h1_sq},       {"censored", m.censored}};
}

void write_mode_moments(Context& ctx, const EmpiricalMeasure& m) {
  CsvWriter csv(ctx.path("invariant_moments.csv"),
                {"mode", "eigenvalue", "second_moment", "std_error"});
  for (std::size_t n = 0; n < m.mode_second_moments.size(); ++n) {
    csv << n << ctx.model.eigenvalues()[n] << m.mode_second_moments[n]
        << m.mode_second_moment_se[n];
    csv.end_row();
  }
  csv.close();
}

InvariantRunParams invariant_params(const Context& ctx) {
  InvariantRunParams p;
  p.burn_in = ctx.config.run.burn_in;
  p.n_samples = ctx.config.run.n_samples;
  p.dt = ctx.dt;
  p.sample_interval = ctx.config.run.sample_interval > 0.0 ? ctx.config.run.sample_interval
                                                           : ctx.config.coupling.horizon;
  p.scheme = ctx.config.run.scheme;
  return p;
}

void cmd_simulate(Context& ctx) {
  const auto x0 = ctx.config.run.x0_1.resolve(ctx.model);
  const TrajectoryRecord traj =
      simulate_path(ctx.model, ctx.noise, x0, ctx.config.run.horizon, ctx.dt,
                    ctx.root.child(kSimulateStream), ctx.config.run.scheme);
  write_json(ctx.path("trajectory.json"),
             trajectory_to_json(ctx.model, traj, ctx.config.run.record_every));
  CsvWriter csv(ctx.path("energy.csv"), {"time", "l2_sq", "h1_sq", "h2_sq"});
  for (std::size_t i = 0; i < traj.states.size(); i += ctx.config.run.record_every) {
    csv << traj.times[i] << sobolev_norm_sq(ctx.model, 0.0, traj.states[i])
        << sobolev_norm_sq(ctx.model, 1.0, traj.states[i])
        << sobolev_norm_sq(ctx.model, 2.0, traj.states[i]);
    csv.end_row();
  }
  csv.close();
  write_json(ctx.path("summary.json"),
             {{"command", "simulate"},
              {"steps", traj.steps()},
              {"blew_up", traj.blew_up},
              {"final_time", traj.times.back()},
              {"final_l2_sq", sobolev_norm_sq(ctx.model, 0.0, traj.final_state())}});
  if (traj.blew_up) fail(ErrorCode::kBlowUp, "simulate: trajectory blew up");
}

void cmd_couple(Context& ctx) {
  const auto x1 = ctx.config.run.x0_1.resolve(ctx.model);
  const auto x2 = ctx.config.run.x0_2.resolve(ctx.model);
  CouplingParams params = ctx.config.coupling;
  const CouplingRecord rec =
      run_coupled_chain(ctx.model, ctx.noise, params, x1, x2, ctx.root.child(kCoupleStream));
  write_coupling_table(ctx.path("coupling_table.csv"), rec);
  write_json(ctx.path("coupling_summary.json"), coupling_summary_json(rec));
  if (rec.censored) fail(ErrorCode::kCensoringOverflow, "couple: the chain was censored");
}

void cmd_mix(Context& ctx) {
  const auto& cfg = ctx.config;
  MixingParams params;
  params.coupling = cfg.coupling;
  params.x01 = cfg.run.x0_1.resolve(ctx.model);
  params.x02 = cfg.run.x0_2.resolve(ctx.model);
  params.n_chains = cfg.run.n_chains;
  params.alphas = cfg.run.alphas;
  params.invariant = invariant_params(ctx);
  params.tv_bins = cfg.run.tv_bins;
  const MixingResult r = mixing_experiment(ctx.model, ctx.noise, params, ctx.root.child(kMixStream));

  CsvWriter decay(ctx.path("decay.csv"), {"n", "time", "p_unmet", "std_error", "tv_hist"});
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    decay << r.steps[i] << r.times[i] << r.p_unmet[i] << r.p_unmet_se[i] << r.tv_hist[i];
    decay.end_row();
  }
  decay.close();

  CsvWriter taus(ctx.path("tau_samples.csv"), {"chain", "tau", "tau_l2", "meeting_step", "k0"});
  auto opt = [](const auto& v) { return v ? format_double(static_cast<double>(*v)) : std::string("nan"); };
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& rec = r.records[i];
    if (rec.censored) continue;
    taus << i << opt(rec.tau) << opt(rec.tau_l2) << opt(rec.meeting_step) << opt(rec.k0);
    taus.end_row();
  }
  taus.close();

  CsvWriter tail(ctx.path("tau_tail.csv"), {"time", "survival"});
  if (r.have_return_times) {
    for (std::size_t i = 0; i < r.return_times.tail.x.size(); ++i) {
      tail << r.return_times.tail.x[i] << r.return_times.tail.p[i];
      tail.end_row();
    }
  }
  tail.close();

  CsvWriter moments(ctx.path("moments.csv"),
                    {"alpha", "mean", "std_error", "cauchy_stable", "tail_finite"});
  if (r.have_return_times) {
    for (const auto& m : r.return_times.moments) {
      moments << m.alpha << m.mean << m.std_error << m.cauchy_stable << m.tail_finite;
      moments.end_row();
    }
  }
  moments.close();

  CsvWriter k0(ctx.path("k0_survival.csv"), {"n", "survival", "known"});
  for (std::size_t n = 0; n < r.k0_survival.size(); ++n) {
    k0 << n << r.k0_survival[n] << r.k0_known[n];
    k0.end_row();
  }
  k0.close();

  CsvWriter sweep(ctx.path("meet_sweep.csv"),
                  {"radius", "delta", "estimate", "wilson_lo", "wilson_hi", "trials", "censored"});
  json sweep_json = json::array();
  const double full_radius = std::sqrt(cfg.coupling.delta);
  auto fractions = cfg.run.meet_radii_fractions;
  std::sort(fractions.begin(), fractions.end());
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double radius = fractions[i] * full_radius;
    const MeetProbability mp =
        estimate_meet_probability(ctx.model, ctx.noise, cfg.coupling, radius, cfg.run.meet_chains,
                                  ctx.root.child(kMeetStream).child(i));
    sweep << radius << radius * radius << mp.met.estimate << mp.met.wilson.lo << mp.met.wilson.hi
          << mp.met.trials << mp.censored;
    sweep.end_row();
    sweep_json.push_back({{"radius", radius}, {"meet", proportion_json(mp.met)}});
  }
  sweep.close();

  write_mode_moments(ctx, r.invariant);

  json moments_json = json::array();
  if (r.have_return_times) {
    for (const auto& m : r.return_times.moments) {
      moments_json.push_back({{"alpha", m.alpha},
                              {"mean", m.mean},
                              {"std_error", m.std_error},
                              {"cauchy_stable", m.cauchy_stable},
                              {"tail_finite", m.tail_finite}});
    }
  }
  write_json(ctx.path("summary.json"),
             {{"command", "mix"},
              {"chains", cfg.run.n_chains},
              {"censored", r.censored},
              {"persistence_violations", r.persistence_violations},
              {"decay_fit", decay_json(r.decay)},
              {"attempt_rate", proportion_json(r.attempt_rate)},
              {"meet_sweep", sweep_json},
              {"return_times",
               {{"samples", r.taus.size()},
                {"tail", decay_json(r.return_times.tail)},
                {"moments", moments_json}}},
              {"invariant", measure_json(r.invariant)}});
}

void cmd_bel_check(Context& ctx) {
  const auto& b = ctx.config.bel;
  const auto x0 = ctx.config.run.x0_1.resolve(ctx.model);
  SpectralState h(ctx.model.size(), 0.0);
  h[b.direction] = 1.0;
  const Observable g = ctx.config.observable();
  const CutoffSpec cutoff = ctx.config.cutoff();
  const RngStream stream = ctx.root.child(kBelStream);
  const Estimate bel = bel_gradient_mean(ctx.model, ctx.noise, cutoff, g, x0, h, b.horizon,
                                         ctx.dt, b.n_samples, stream.child(1));
  SpectralState lo = x0, hi = x0;
  lo[b.direction] -= b.fd_eps;
  hi[b.direction] += b.fd_eps;
  Estimate fd = direct_difference(ctx.model, ctx.noise, cutoff, g, lo, hi, b.horizon, ctx.dt,
                                  b.n_samples, stream.child(2));
  fd.value /= 2.0 * b.fd_eps;
  fd.std_error /= 2.0 * b.fd_eps;
  const double combined = std::hypot(bel.std_error, fd.std_error);
  const double z = combined > 0.0 ? (bel.value - fd.value) / combined : 0.0;
  auto est = [](const Estimate& e) {
    return json{{"value", e.value}, {"std_error", e.std_error}, {"samples", e.samples},
                {"censored", e.censored}};
  };
  write_json(ctx.path("bel.json"), {{"command", "bel-check"},
                                    {"observable", g.name()},
                                    {"direction", b.direction},
                                    {"k0", b.k0 ? json(*b.k0) : json(nullptr)},
                                    {"horizon", b.horizon},
                                    {"bel", est(bel)},
                                    {"finite_difference", est(fd)},
                                    {"z_score", z}});
}

void cmd_invariant(Context& ctx) {
  const auto x0 = ctx.config.run.x0_1.resolve(ctx.model);
  const EmpiricalMeasure m = estimate_invariant_measure(ctx.model, ctx.noise, x0,
                                                        invariant_params(ctx),
                                                        ctx.root.child(kInvariantStream));
  write_mode_moments(ctx, m);
  json j = measure_json(m);
  j["command"] = "invariant";
  write_json(ctx.path("summary.json"), j);
  if (m.censored) fail(ErrorCode::kCensoringOverflow, "invariant: the run blew up");
}

void cmd_small_noise(Context& ctx) {
  const auto& s = ctx.config.small_noise;
  const auto x0 = ctx.config.run.x0_1.resolve(ctx.model);
  const SmallNoiseResult r =
      small_noise_probability(ctx.model, ctx.noise, x0, s.horizon, ctx.dt, s.thresholds,
                              s.n_samples, ctx.root.child(kSmallNoiseStream));
  CsvWriter csv(ctx.path("small_noise.csv"),
                {"threshold", "estimate", "wilson_lo", "wilson_hi", "successes", "trials"});
  json rows = json::array();
  for (std::size_t i = 0; i < r.thresholds.size(); ++i) {
    const auto& p = r.estimates[i];
    csv << r.thresholds[i] << p.estimate << p.wilson.lo << p.wilson.hi << p.successes << p.trials;
    csv.end_row();
    rows.push_back({{"threshold", r.thresholds[i]}, {"probability", proportion_json(p)}});
  }
  csv.close();
  write_json(ctx.path("summary.json"),
             {{"command", "small-noise"}, {"censored", r.censored}, {"estimates", rows}});
  if (static_cast<double>(r.censored) > 0.1 * static_cast<double>(s.n_samples)) {
    fail(ErrorCode::kCensoringOverflow, "small-noise: more than 10% of paths censored");
  }
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> commands{"simulate",  "couple",    "mix",
                                                 "bel-check", "invariant", "small-noise"};
  return commands;
}

RunOutcome run(const RunRequest& request) {
  RunOutcome out;
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), request.command) == cmds.end()) {
    out.exit_code = kExitConfig;
    out.message = "unknown command '" + request.command + "'";
    return out;
  }

  std::optional<Context> ctx;
  try {
    ExperimentConfig config = load_config(request.config_path, request.overrides);
    if (request.seed) config.run.seed = *request.seed;
    if (request.output_dir) config.run.output_dir = *request.output_dir;
    GalerkinModel model = config.build_model();
    NoiseSpec noise = config.build_noise(model);
    validate_against_model(config, model, noise);
    const double dt = config.step_size(model);
    const RngStream root(config.run.seed, 0);
    ctx.emplace(Context{config, std::move(model), std::move(noise), dt,
                        fs::path(config.run.output_dir), root, {}});
  } catch (const Error& e) {
    out.exit_code = kExitConfig;
    out.message = e.what();
    return out;
  }

  try {
    std::error_code ec;
    fs::create_directories(ctx->dir, ec);
    if (ec) fail(ErrorCode::kIo, "cannot create '" + ctx->dir.string() + "': " + ec.message());
    set_worker_count(request.threads ? request.threads
                                     : std::max(1u, std::thread::hardware_concurrency()));

    write_json(ctx->path("manifest.json"), {{"manifest_version", 1},
                                            {"tool", "nsmix"},
                                            {"tool_version", NSMIX_VERSION_STRING},
                                            {"command", request.command},
                                            {"seed", ctx->config.run.seed},
                                            {"config", to_json(ctx->config)}});
    write_json(ctx->path("model.json"), model_to_json(ctx->model));

    if (request.command == "simulate") {
      cmd_simulate(*ctx);
    } else if (request.command == "couple") {
      cmd_couple(*ctx);
    } else if (request.command == "mix") {
      cmd_mix(*ctx);
    } else if (request.command == "bel-check") {
      cmd_bel_check(*ctx);
    } else if (request.command == "invariant") {
      cmd_invariant(*ctx);
    } else {
      cmd_small_noise(*ctx);
    }
    out.message = request.command + ": wrote " + std::to_string(ctx->files.size()) +
                  " files to " + ctx->dir.string();
  } catch (const Error& e) {
    out.exit_code = e.code() == ErrorCode::kCensoringOverflow ? kExitCensoring
                    : e.code() == ErrorCode::kConfig          ? kExitConfig
                                                              : kExitFailure;
    out.message = e.what();
  } catch (const std::exception& e) {
    out.exit_code = kExitFailure;
    out.message = e.what();
  }
  out.files = ctx->files;
  return out;
}

}  // namespace nsmix
