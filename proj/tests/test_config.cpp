// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "doctest.h"
#include "nsmix/config.hpp"
#include "nsmix/error.hpp"

using namespace nsmix;
using nlohmann::json;

namespace {

const std::string kDefault = std::string(NSMIX_SOURCE_DIR) + "/configs/default.json";

ErrorCode code_of(const json& doc) {
  try {
    (void)parse_config(doc);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;  // sentinel: no error
}

std::string message_of(const json& doc) {
  try {
    (void)parse_config(doc);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("default config loads and builds") {
  const auto cfg = load_config(kDefault);
  CHECK(cfg.model.kind == "shell");
  CHECK(cfg.model.shells == 4);
  CHECK(cfg.coupling.horizon == 4.0);
  CHECK(cfg.coupling.delta == 0.3);
  CHECK(cfg.run.alphas.size() == 4);
  const auto model = cfg.build_model();
  const auto noise = cfg.build_noise(model);
  CHECK(model.size() == 4);
  CHECK(noise.decay_exponent() == 2.75);
  CHECK(cfg.step_size(model) == 1e-3);
  CHECK_NOTHROW(validate_against_model(cfg, model, noise));
  const auto x = cfg.run.x0_1.resolve(model);
  CHECK(x == SpectralState{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("an empty document takes every default") {
  const auto cfg = parse_config(json::object());
  CHECK(cfg.run.seed == 20260101u);
  CHECK(cfg.noise.kind == "constant");
}

TEST_CASE("unknown keys are rejected with their path") {
  json doc = {{"run", {{"n_chain", 10}}}};
  CHECK(code_of(doc) == ErrorCode::kConfig);
  CHECK(message_of(doc).find("run.n_chain") != std::string::npos);
  CHECK(code_of(json{{"modle", json::object()}}) == ErrorCode::kConfig);
}

TEST_CASE("type and range errors") {
  CHECK(code_of(json{{"run", {{"n_chains", 1.5}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"run", {{"n_chains", "many"}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"run", {{"n_chains", -5}}}}) == ErrorCode::kConfig);
  CHECK(parse_config(json{{"run", {{"n_chains", 7}}}}).run.n_chains == 7);
  CHECK(code_of(json{{"noise", {{"scale", 0.0}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"noise", {{"kind", "modulated"}, {"modulation", 1.0}}}}) ==
        ErrorCode::kConfig);
  CHECK(code_of(json{{"noise", {{"modulation", 0.3}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"model", {{"shells", 2}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"model", {{"kind", "torus"}, {"cutoff", 9}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"model", {{"kind", "channel"}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"coupling", {{"T", -1.0}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"coupling", {{"T", 1.0}, {"dt", 0.3}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"run", {{"meet_chains", 50}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"run", {{"alphas", {0.1, -0.1}}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"run", {{"scheme", "rk4"}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"small_noise", {{"thresholds", {0.0}}}}}) == ErrorCode::kConfig);
  CHECK(code_of(json{{"schema_version", 2}}) == ErrorCode::kConfig);
}

TEST_CASE("initial states must match the model") {
  auto cfg = parse_config(json{{"run", {{"x0_1", {1.0, 2.0}}}}});
  const auto model = cfg.build_model();
  const auto noise = cfg.build_noise(model);
  CHECK_THROWS_AS(validate_against_model(cfg, model, noise), Error);
  cfg = parse_config(json{{"model", {{"forcing", {{"modes", json::array({7})}}}}}});
  CHECK_THROWS_AS(validate_against_model(cfg, cfg.build_model(), noise), Error);
}

TEST_CASE("overrides") {
  json doc = json::object();
  apply_override(doc, "run.n_chains=200");
  apply_override(doc, "run.scheme=euler_maruyama");
  apply_override(doc, "coupling.T=2");
  apply_override(doc, "run.alphas=[0.5]");
  const auto cfg = parse_config(doc);
  CHECK(cfg.run.n_chains == 200);
  CHECK(cfg.run.scheme == Scheme::kEulerMaruyama);
  CHECK(cfg.coupling.horizon == 2.0);
  CHECK(cfg.run.alphas == std::vector<double>{0.5});
  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), Error);
  CHECK_THROWS_AS(apply_override(doc, "=3"), Error);
  CHECK_THROWS_AS(load_config(kDefault, {"run.bogus=1"}), Error);
}

TEST_CASE("to_json round trips, also through a manifest") {
  auto cfg = load_config(kDefault, {"bel.k0=2.5", "run.x0_2=[0.1,0.2,0.3,0.4]"});
  const json once = to_json(cfg);
  const auto back = parse_config(once);
  CHECK(to_json(back) == once);
  REQUIRE(back.bel.k0.has_value());
  CHECK(*back.bel.k0 == 2.5);
  CHECK(back.run.x0_2.values == std::vector<double>{0.1, 0.2, 0.3, 0.4});

  const json manifest = {{"manifest_version", 1}, {"tool", "nsmix"}, {"config", once}};
  CHECK(to_json(parse_config(manifest)) == once);
  json m2 = manifest;
  apply_override(m2, "run.seed=5");
  CHECK(parse_config(m2).run.seed == 5u);
}

TEST_CASE("missing files are config errors") {
  try {
    (void)load_config("/nonexistent/config.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(std::string(e.what()).find("/nonexistent/config.json") != std::string::npos);
  }
}
