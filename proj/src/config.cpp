// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "nsmix/error.hpp"

namespace nsmix {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::kConfig, what); }

void check(bool ok, const std::string& what) {
  if (!ok) config_error(what);
}

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    check(j_.is_object(), where() + " must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json* raw(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& out) {
    if (const json* v = raw(key)) {
      check(v->is_number(), field(key) + ": expected a number");
      out = v->get<double>();
      check(std::isfinite(out), field(key) + ": must be finite");
    }
  }

  template <typename Int>
  void integer(const char* key, Int& out) {
    if (const json* v = raw(key)) {
      check(v->is_number_integer(), field(key) + ": expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        check(v->is_number_unsigned() || v->get<std::int64_t>() >= 0,
              field(key) + ": must be nonnegative");
        out = static_cast<Int>(v->get<std::uint64_t>());
      } else {
        const auto x = v->get<std::int64_t>();
        check(x >= std::numeric_limits<Int>::min() && x <= std::numeric_limits<Int>::max(),
              field(key) + ": out of range");
        out = static_cast<Int>(x);
      }
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = raw(key)) {
      check(v->is_string(), field(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const char* key, std::vector<double>& out) {
    if (const json* v = raw(key)) {
      check(v->is_array(), field(key) + ": expected an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        check(e.is_number() && std::isfinite(e.get<double>()),
              field(key) + ": expected finite numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  void indices(const char* key, std::vector<std::size_t>& out) {
    if (const json* v = raw(key)) {
      check(v->is_array(), field(key) + ": expected an array of indices");
      out.clear();
      for (const auto& e : *v) {
        check(e.is_number_integer() && e.get<std::int64_t>() >= 0, field(key) + ": expected nonnegative integers");
        out.push_back(e.get<std::size_t>());
      }
    }
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) config_error("unknown key " + field(item.key().c_str()));
    }
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "configuration" : path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Scheme parse_scheme(const std::string& s) {
  if (s == "semi_implicit") return Scheme::kSemiImplicit;
  if (s == "euler_maruyama") return Scheme::kEulerMaruyama;
  config_error("run.scheme: expected semi_implicit or euler_maruyama, got '" + s + "'");
}

void read_state(Block& b, const char* key, InitialState& out) {
  if (const json* v = b.raw(key)) {
    if (v->is_number()) {
      out.amplitude = v->get<double>();
      out.values.clear();
      check(std::isfinite(*out.amplitude), b.field(key) + ": must be finite");
    } else if (v->is_array()) {
      out.amplitude.reset();
      out.values.clear();
      for (const auto& e : *v) {
        check(e.is_number() && std::isfinite(e.get<double>()),
              b.field(key) + ": expected finite numbers");
        out.values.push_back(e.get<double>());
      }
    } else {
      config_error(b.field(key) + ": expected a number or an array");
    }
  }
}

json state_json(const InitialState& s) {
  if (s.amplitude) return *s.amplitude;
  return s.values;
}

void validate(const ExperimentConfig& c) {
  const auto& m = c.model;
  check(m.kind == "shell" || m.kind == "torus", "model.kind: expected shell or torus");
  check(m.nu > 0.0, "model.nu must be positive");
  if (m.kind == "torus") {
    check(m.cutoff >= 1 && m.cutoff <= 4, "model.cutoff must be in [1, 4]");
  } else {
    check(m.shells >= 3 && m.shells <= 24, "model.shells must be in [3, 24]");
    check(m.mu1 > 0.0, "model.mu1 must be positive");
    check(m.lambda > 1.0, "model.lambda must exceed 1");
  }
  const auto& n = c.noise;
  check(n.kind == "constant" || n.kind == "modulated",
        "noise.kind: expected constant or modulated");
  check(n.s >= 0.0, "noise.s must be nonnegative");
  check(n.scale > 0.0, "noise.scale must be positive (degenerate noise)");
  check(std::abs(n.modulation) < 1.0, "noise.modulation must satisfy |a| < 1");
  check(n.kind == "modulated" || n.modulation == 0.0,
        "noise.modulation requires noise.kind = modulated");
  try {
    c.coupling.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  const auto& r = c.run;
  check(r.n_chains >= 1, "run.n_chains must be >= 1");
  check(r.meet_chains >= 100, "run.meet_chains must be >= 100");
  check(r.horizon > 0.0, "run.horizon must be positive");
  check(r.burn_in >= 0.0, "run.burn_in must be nonnegative");
  check(r.dt >= 0.0, "run.dt must be nonnegative (0 selects the default)");
  check(r.n_samples >= 20, "run.n_samples must be >= 20");
  check(r.sample_interval >= 0.0, "run.sample_interval must be nonnegative");
  for (double a : r.alphas) check(a > 0.0, "run.alphas must be positive");
  for (double f : r.meet_radii_fractions) {
    check(f >= 0.0 && f <= 1.0, "run.meet_radii_fractions must lie in [0, 1]");
  }
  check(r.tv_bins >= 2, "run.tv_bins must be >= 2");
  check(r.record_every >= 1, "run.record_every must be >= 1");
  const auto& b = c.bel;
  try {
    (void)Observable::from_name(b.observable);
  } catch (const Error& e) {
    config_error(std::string("bel.observable: ") + e.what());
  }
  check(b.cap > 0.0 && b.width > 0.0, "bel.cap and bel.width must be positive");
  check(!b.k0 || *b.k0 >= 0.0, "bel.k0 must be nonnegative");
  check(b.horizon > 0.0, "bel.horizon must be positive");
  check(b.n_samples >= 2, "bel.n_samples must be >= 2");
  check(b.fd_eps > 0.0, "bel.fd_eps must be positive");
  const auto& s = c.small_noise;
  check(s.horizon > 0.0, "small_noise.horizon must be positive");
  check(!s.thresholds.empty(), "small_noise.thresholds must not be empty");
  for (double m : s.thresholds) check(m > 0.0, "small_noise.thresholds must be positive");
  check(s.n_samples >= 1, "small_noise.n_samples must be >= 1");
}

}  // namespace

SpectralState InitialState::resolve(const GalerkinModel& model) const {
  SpectralState x(model.size(), 0.0);
  if (amplitude) {
    x[0] = *amplitude;
    return x;
  }
  check(values.size() == model.size(),
        "initial state has " + std::to_string(values.size()) + " entries, model has " +
            std::to_string(model.size()));
  return values;
}

ExperimentConfig parse_config(const json& document) {
  const json* doc = &document;
  // A manifest carries the resolved configuration under "config".
  if (document.is_object() && document.contains("manifest_version")) {
    check(document.contains("config"), "manifest has no config block");
    doc = &document.at("config");
  }
  ExperimentConfig c;
  Block top(*doc, "");
  top.integer("schema_version", c.schema_version);
  check(c.schema_version == kConfigSchemaVersion,
        "schema_version " + std::to_string(c.schema_version) + " is not supported");

  if (const json* v = top.raw("model")) {
    Block b(*v, "model");
    b.string("kind", c.model.kind);
    b.integer("cutoff", c.model.cutoff);
    b.integer("shells", c.model.shells);
    b.number("mu1", c.model.mu1);
    b.number("lambda", c.model.lambda);
    b.number("coupling", c.model.coupling);
    b.number("nu", c.model.nu);
    if (const json* f = b.raw("forcing")) {
      Block fb(*f, "model.forcing");
      fb.number("amplitude", c.model.forcing_amplitude);
      fb.indices("modes", c.model.forcing_modes);
      fb.finish();
    }
    b.finish();
  }
  if (const json* v = top.raw("noise")) {
    Block b(*v, "noise");
    b.string("kind", c.noise.kind);
    b.number("s", c.noise.s);
    b.number("modulation", c.noise.modulation);
    b.number("scale", c.noise.scale);
    b.finish();
  }
  if (const json* v = top.raw("coupling")) {
    Block b(*v, "coupling");
    b.number("T", c.coupling.horizon);
    b.number("delta", c.coupling.delta);
    b.number("dt", c.coupling.dt);
    b.number("rho", c.coupling.rho);
    b.integer("max_macro_steps", c.coupling.max_macro_steps);
    b.number("delta_l2", c.coupling.delta_l2);
    b.finish();
  }
  if (const json* v = top.raw("run")) {
    Block b(*v, "run");
    b.integer("n_chains", c.run.n_chains);
    b.integer("meet_chains", c.run.meet_chains);
    b.number("horizon", c.run.horizon);
    b.number("burn_in", c.run.burn_in);
    b.integer("seed", c.run.seed);
    b.string("output_dir", c.run.output_dir);
    read_state(b, "x0_1", c.run.x0_1);
    read_state(b, "x0_2", c.run.x0_2);
    std::string scheme = to_string(c.run.scheme);
    b.string("scheme", scheme);
    c.run.scheme = parse_scheme(scheme);
    b.number("dt", c.run.dt);
    b.integer("n_samples", c.run.n_samples);
    b.number("sample_interval", c.run.sample_interval);
    b.numbers("alphas", c.run.alphas);
    b.numbers("meet_radii_fractions", c.run.meet_radii_fractions);
    b.integer("tv_bins", c.run.tv_bins);
    b.integer("record_every", c.run.record_every);
    b.finish();
  }
  c.coupling.scheme = c.run.scheme;
  if (const json* v = top.raw("bel")) {
    Block b(*v, "bel");
    b.string("observable", c.bel.observable);
    b.integer("index", c.bel.index);
    b.number("cap", c.bel.cap);
    b.number("radius", c.bel.radius);
    b.number("width", c.bel.width);
    if (const json* k = b.raw("k0")) {
      if (k->is_null()) {
        c.bel.k0.reset();
      } else {
        double k0 = 0.0;
        b.number("k0", k0);
        c.bel.k0 = k0;
      }
    }
    b.number("horizon", c.bel.horizon);
    b.integer("n_samples", c.bel.n_samples);
    b.integer("direction", c.bel.direction);
    b.number("fd_eps", c.bel.fd_eps);
    b.finish();
  }
  if (const json* v = top.raw("small_noise")) {
    Block b(*v, "small_noise");
    b.number("horizon", c.small_noise.horizon);
    b.numbers("thresholds", c.small_noise.thresholds);
    b.integer("n_samples", c.small_noise.n_samples);
    b.finish();
  }
  top.finish();
  validate(c);
  return c;
}

void apply_override(json& document, const std::string& assignment) {
  const auto eq = assignment.find('=');
  check(eq != std::string::npos && eq > 0, "override '" + assignment + "' is not KEY=VALUE");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &document;
  if (document.contains("manifest_version") && document.contains("config")) {
    node = &document["config"];
  }
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    check(!part.empty(), "override key '" + key + "' has an empty component");
    check(node->is_object() || node->is_null(), "override key '" + key + "' crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) config_error("cannot read configuration file '" + path + "'");
  json document = json::parse(in, nullptr, false);
  if (document.is_discarded()) config_error("'" + path + "' is not valid JSON");
  for (const auto& o : overrides) apply_override(document, o);
  return parse_config(document);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["model"] = {{"kind", c.model.kind},         {"cutoff", c.model.cutoff},
                {"shells", c.model.shells},     {"mu1", c.model.mu1},
                {"lambda", c.model.lambda},     {"coupling", c.model.coupling},
                {"nu", c.model.nu},
                {"forcing", {{"amplitude", c.model.forcing_amplitude},
                             {"modes", c.model.forcing_modes}}}};
  j["noise"] = {{"kind", c.noise.kind},
                {"s", c.noise.s},
                {"modulation", c.noise.modulation},
                {"scale", c.noise.scale}};
  j["coupling"] = {{"T", c.coupling.horizon},     {"delta", c.coupling.delta},
                   {"dt", c.coupling.dt},         {"rho", c.coupling.rho},
                   {"max_macro_steps", c.coupling.max_macro_steps},
                   {"delta_l2", c.coupling.delta_l2}};
  j["run"] = {{"n_chains", c.run.n_chains},
              {"meet_chains", c.run.meet_chains},
              {"horizon", c.run.horizon},
              {"burn_in", c.run.burn_in},
              {"seed", c.run.seed},
              {"output_dir", c.run.output_dir},
              {"x0_1", state_json(c.run.x0_1)},
              {"x0_2", state_json(c.run.x0_2)},
              {"scheme", to_string(c.run.scheme)},
              {"dt", c.run.dt},
              {"n_samples", c.run.n_samples},
              {"sample_interval", c.run.sample_interval},
              {"alphas", c.run.alphas},
              {"meet_radii_fractions", c.run.meet_radii_fractions},
              {"tv_bins", c.run.tv_bins},
              {"record_every", c.run.record_every}};
  j["bel"] = {{"observable", c.bel.observable},
              {"index", c.bel.index},
              {"cap", c.bel.cap},
              {"radius", c.bel.radius},
              {"width", c.bel.width},
              {"k0", c.bel.k0 ? json(*c.bel.k0) : json(nullptr)},
              {"horizon", c.bel.horizon},
              {"n_samples", c.bel.n_samples},
              {"direction", c.bel.direction},
              {"fd_eps", c.bel.fd_eps}};
  j["small_noise"] = {{"horizon", c.small_noise.horizon},
                      {"thresholds", c.small_noise.thresholds},
                      {"n_samples", c.small_noise.n_samples}};
  return j;
}

GalerkinModel ExperimentConfig::build_model() const {
  Forcing f;
  f.amplitude = model.forcing_amplitude;
  f.modes = model.forcing_modes;
  try {
    if (model.kind == "torus") return GalerkinModel::torus(model.cutoff, model.nu, f);
    ShellParams p;
    p.n_shells = model.shells;
    p.coupling = model.coupling;
    p.mu1 = model.mu1;
    p.lambda = model.lambda;
    return GalerkinModel::shell(p, model.nu, f);
  } catch (const Error& e) {
    config_error(std::string("model: ") + e.what());
  }
}

NoiseSpec ExperimentConfig::build_noise(const GalerkinModel& m) const {
  try {
    const NoiseKind kind =
        noise.kind == "modulated" ? NoiseKind::kModulatedDiagonal : NoiseKind::kConstantDiagonal;
    return NoiseSpec(m, kind, noise.s, noise.modulation, noise.scale);
  } catch (const Error& e) {
    config_error(std::string("noise: ") + e.what());
  }
}

double ExperimentConfig::step_size(const GalerkinModel& m) const {
  return run.dt > 0.0 ? run.dt : default_dt(m);
}

Observable ExperimentConfig::observable() const {
  Observable g = Observable::from_name(bel.observable);
  g.index = bel.index;
  g.cap = bel.cap;
  g.radius = bel.radius;
  g.width = bel.width;
  return g;
}

CutoffSpec ExperimentConfig::cutoff() const {
  CutoffSpec c;
  if (bel.k0) c.k0 = *bel.k0;
  return c;
}

void validate_against_model(const ExperimentConfig& c, const GalerkinModel& model,
                            const NoiseSpec& noise) {
  for (std::size_t m : c.model.forcing_modes) {
    check(m < model.size(), "model.forcing.modes: index " + std::to_string(m) +
                                " out of range for " + std::to_string(model.size()) + " modes");
  }
  (void)c.run.x0_1.resolve(model);
  (void)c.run.x0_2.resolve(model);
  check(noise.min_amplitude() > kDegenerateNoiseThreshold,
        "noise: amplitudes underflow (degenerate noise)");
  check(c.bel.direction < model.size(), "bel.direction out of range");
  check(c.observable().kind != ObservableKind::kCoordinate || c.bel.index < model.size(),
        "bel.index out of range");
}

}  // namespace nsmix
