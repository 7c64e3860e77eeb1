// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nsmix/nsmix.h"

namespace {

constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::vector<std::string> overrides;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nsmix: stochastic Galerkin Navier-Stokes simulator and mixing lab"};
  app.set_version_flag("--version", std::string(nsmix_version()));
  app.require_subcommand(1);

  Options opt;
  auto* config = app.add_option("--config", opt.config, "experiment configuration (JSON) or manifest");
  auto* out = app.add_option("--out", opt.out, "output directory (overrides run.output_dir)");
  auto* seed = app.add_option("--seed", opt.seed, "root seed (overrides run.seed)");
  app.add_option("--threads", opt.threads, "worker threads, 0 = available parallelism")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--override", opt.overrides, "dotted KEY=VALUE applied before validation")
      ->take_all();
  config->required();

  const char* descriptions[][2] = {
      {"simulate", "integrate one path and dump the trajectory"},
      {"couple", "run one coupled chain and write its macro-step table"},
      {"mix", "mixing experiment: decay series, meet sweep, return times"},
      {"bel-check", "BEL gradient estimate against a finite-difference oracle"},
      {"invariant", "time-averaged invariant-measure moments"},
      {"small-noise", "probability that the stochastic convolution stays small"},
  };
  for (const auto& d : descriptions) app.add_subcommand(d[0], d[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::vector<const char*> overrides;
  for (const auto& o : opt.overrides) overrides.push_back(o.c_str());

  nsmix_run_options ro{};
  ro.command = command.c_str();
  ro.config_path = opt.config.c_str();
  ro.output_dir = out->count() ? opt.out.c_str() : nullptr;
  ro.has_seed = seed->count() ? 1 : 0;
  ro.seed = opt.seed;
  ro.threads = opt.threads;
  ro.overrides = overrides.data();
  ro.n_overrides = overrides.size();

  char message[4096];
  const int code = nsmix_run(&ro, message, sizeof message);
  (code == 0 ? std::cout : std::cerr) << (code == 0 ? "" : "nsmix: error: ") << message << '\n';
  return code;
}
