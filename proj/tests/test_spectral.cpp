// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "doctest.h"
#include "nsmix/error.hpp"
#include "nsmix/spectral.hpp"
#include "oracles.hpp"

using namespace nsmix;

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_antisymmetry(const GalerkinModel& model) {
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, double> t;
  for (const auto& e : model.triads()) t[{e.l, e.m, e.n}] += e.value;
  for (const auto& [key, v] : t) {
    const auto [l, m, n] = key;
    auto it = t.find({l, n, m});
    REQUIRE(it != t.end());
    CHECK(it->second == -v);  // exact
  }
}

}  // namespace

TEST_CASE("torus basis sizes and eigenvalues") {
  const auto m1 = GalerkinModel::torus(1);
  CHECK(m1.size() == 12);
  for (double mu : m1.eigenvalues()) CHECK(mu == doctest::Approx(4.0 * std::numbers::pi * std::numbers::pi));
  const auto m2 = GalerkinModel::torus(2);
  CHECK(m2.size() == 36);
  for (const auto& w : m2.modes()) {
    double kp = 0.0, pp = 0.0;
    for (int c = 0; c < 3; ++c) {
      kp += w.wavevector[c] * w.direction[c];
      pp += w.direction[c] * w.direction[c];
    }
    CHECK(std::abs(kp) < 1e-15);  // divergence free
    CHECK(pp == doctest::Approx(1.0));
  }
}

TEST_CASE("torus tensor matches grid quadrature") {
  const auto model = GalerkinModel::torus(1);
  const auto modes = model.modes();
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, double> stored;
  for (const auto& e : model.triads()) stored[{e.l, e.m, e.n}] = e.value;
  double worst = 0.0;
  for (std::uint32_t l = 0; l < modes.size(); ++l) {
    for (std::uint32_t m = 0; m < modes.size(); ++m) {
      for (std::uint32_t n = 0; n < modes.size(); ++n) {
        const double q = oracle::torus_triad_quadrature(modes[l], modes[m], modes[n], 8);
        auto it = stored.find({l, m, n});
        const double v = it == stored.end() ? 0.0 : it->second;
        worst = std::max(worst, std::abs(q - v));
      }
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("bilinear term conserves energy and is antisymmetric") {
  for (const auto& model : {GalerkinModel::torus(2), GalerkinModel::shell(ShellParams{})}) {
    check_antisymmetry(model);
    for (unsigned s = 0; s < 50; ++s) {
      const auto u = oracle::random_state(model.size(), 3 * s);
      const auto v = oracle::random_state(model.size(), 3 * s + 1);
      const auto w = oracle::random_state(model.size(), 3 * s + 2);
      const auto buv = bilinear_B(model, u, v);
      const auto buw = bilinear_B(model, u, w);
      const double scale = max_abs(buv) * max_abs(v) * static_cast<double>(model.size()) + 1.0;
      CHECK(std::abs(inner(buv, v)) <= 1e-12 * scale);
      CHECK(std::abs(inner(buv, w) + inner(buw, v)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("shell model structure") {
  ShellParams p;
  p.n_shells = 5;
  p.mu1 = 2.0;
  p.lambda = 1.5;
  const auto model = GalerkinModel::shell(p, 0.5);
  REQUIRE(model.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(model.eigenvalues()[i] == doctest::Approx(2.0 * std::pow(1.5, 2.0 * i)));
  }
  CHECK(model.triads().size() == 3 * 6);  // 3 triads, 6 stored entries each
  const auto lin = model.linearized();
  CHECK(lin.triads().empty());
  CHECK(lin.size() == model.size());
  p.coupling = 0.0;
  CHECK(GalerkinModel::shell(p).triads().empty());
  p.n_shells = 2;
  CHECK_THROWS_AS(GalerkinModel::shell(p), Error);
}

TEST_CASE("forcing placement and validation") {
  Forcing f;
  f.amplitude = 0.3;
  f.modes = {0, 2};
  const auto m = GalerkinModel::shell(ShellParams{}, 1.0, f);
  CHECK(m.forcing()[0] == 0.3);
  CHECK(m.forcing()[1] == 0.0);
  CHECK(m.forcing()[2] == 0.3);
  f.modes = {99};
  CHECK_THROWS_AS(GalerkinModel::shell(ShellParams{}, 1.0, f), Error);
  CHECK_THROWS_AS(GalerkinModel::torus(1, -1.0), Error);
}

TEST_CASE("sobolev norms and projection") {
  const auto model = GalerkinModel::shell(ShellParams{});
  const auto u = oracle::random_state(model.size(), 9);
  const auto mu = model.eigenvalues();
  double h2 = 0.0, h15 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    h2 += mu[i] * mu[i] * u[i] * u[i];
    h15 += std::pow(mu[i], 1.5) * u[i] * u[i];
  }
  CHECK(sobolev_norm_sq(model, 2.0, u) == doctest::Approx(h2).epsilon(1e-14));
  CHECK(sobolev_norm_sq(model, 1.5, u) == doctest::Approx(h15).epsilon(1e-14));
  CHECK(sobolev_norm(model, 0.0, u) == doctest::Approx(std::sqrt(inner(u, u))));
  const auto a = apply_A_power(model, 1.0, u);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(a[i] == doctest::Approx(mu[i] * u[i]));
  const auto p = project(model, 2, u);
  CHECK(p[0] == u[0]);
  CHECK(p[1] == u[1]);
  for (std::size_t i = 2; i < u.size(); ++i) CHECK(p[i] == 0.0);
  CHECK_THROWS_AS(bilinear_B(model, std::vector<double>(2), u), Error);
}
