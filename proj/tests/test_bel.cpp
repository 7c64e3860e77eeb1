// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nsmix/bel.hpp"
#include "nsmix/error.hpp"
#include "nsmix/noise.hpp"
#include "oracles.hpp"

using namespace nsmix;
using doctest::Approx;

namespace {

GalerkinModel shell4(double coupling = 1.0) {
  ShellParams p;
  p.n_shells = 4;
  p.coupling = coupling;
  Forcing f;
  f.amplitude = 0.1;
  f.modes = {0};
  return GalerkinModel::shell(p, 1.0, f);
}

}  // namespace

TEST_CASE("cutoff psi") {
  const CutoffSpec trivial;
  CHECK(psi_cutoff(trivial, 1e300).value == 1.0);
  CHECK(psi_cutoff(trivial, 1e300).derivative == 0.0);
  const CutoffSpec c{2.0};
  CHECK(psi_cutoff(c, 1.0).value == 1.0);
  CHECK(psi_cutoff(c, 2.0).value == 1.0);
  CHECK(psi_cutoff(c, 3.0).value == 0.0);
  CHECK(psi_cutoff(c, 2.5).value == Approx(0.5));
  for (double r : {2.1, 2.4, 2.7, 2.95}) {
    const double e = 1e-6;
    const double fd = (psi_cutoff(c, r + e).value - psi_cutoff(c, r - e).value) / (2 * e);
    CHECK(psi_cutoff(c, r).derivative == Approx(fd).epsilon(1e-6));
    CHECK(psi_cutoff(c, r).derivative <= 0.0);
  }
}

TEST_CASE("observable registry values and gradients") {
  const auto x = oracle::random_state(4, 3);
  for (const char* name : {"constant", "coordinate", "squared_norm_capped", "smooth_indicator"}) {
    Observable g = Observable::from_name(name);
    CHECK(std::string(g.name()) == name);
    g.index = 2;
    g.cap = 3.0;
    g.radius = 2.0;
    g.width = 0.7;
    std::vector<double> grad(4);
    g.gradient(x, grad);
    for (std::size_t i = 0; i < 4; ++i) {
      auto xp = x, xm = x;
      xp[i] += 1e-6;
      xm[i] -= 1e-6;
      CHECK(grad[i] == Approx((g.value(xp) - g.value(xm)) / 2e-6).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(Observable::from_name("nope"), Error);
}

TEST_CASE("BEL recovers the exact OU gradient") {
  const auto model = shell4(0.0);
  const auto noise = NoiseSpec::constant(model, 1.0);
  Observable g = Observable::from_name("coordinate");
  g.index = 1;
  std::vector<double> x0(4, 0.3), h{0.5, 1.0, -0.7, 0.2};
  const double horizon = 0.5, dt = 1e-3;
  const auto est = bel_gradient_mean(model, noise, CutoffSpec{}, g, x0, h, horizon, dt, 10000,
                                     RngStream(8, 0));
  const double exact = std::pow(std::exp(-model.eigenvalues()[1] * dt), 500) * h[1];
  CHECK(std::abs(est.value - exact) <= 3.0 * est.std_error);
  CHECK(est.censored == 0);
}

TEST_CASE("drift term vanishes identically without a cutoff") {
  const auto model = shell4();
  const auto noise = NoiseSpec::constant(model, 2.75);
  const Observable g = Observable::from_name("squared_norm_capped");
  const auto x0 = oracle::random_state(4, 1);
  const auto h = oracle::random_state(4, 2);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto s = bel_gradient_sample(model, noise, CutoffSpec{}, g, x0, h, 0.3, 1e-3,
                                       RngStream(1, i));
    CHECK(s.dpsi == 0.0);
    CHECK(s.drift_part() == 0.0);
    CHECK(s.psi == 1.0);
  }
}

TEST_CASE("zero direction gives a zero estimate") {
  const auto model = shell4();
  const auto noise = NoiseSpec::constant(model, 2.75);
  const std::vector<double> x0(4, 0.1), h(4, 0.0);
  const auto s = bel_gradient_sample(model, noise, CutoffSpec{}, Observable{}, x0, h, 0.1, 1e-3,
                                     RngStream(1, 0));
  CHECK(s.value(0.1) == 0.0);
}

TEST_CASE("BEL with a cutoff agrees with common-noise finite differences") {
  const auto model = shell4();
  const auto noise = NoiseSpec::constant(model, 2.0);
  const auto x0 = std::vector<double>{0.4, -0.2, 0.05, 0.0};
  const std::vector<double> h{1.0, 0.0, 0.0, 0.0};
  const double horizon = 0.5, dt = 1e-3;

  // Put K0 at the median energy so that psi' contributes.
  std::vector<double> energies;
  for (std::uint64_t i = 0; i < 200; ++i) {
    energies.push_back(bel_gradient_sample(model, noise, CutoffSpec{}, Observable{}, x0, h,
                                           horizon, dt, RngStream(2, i))
                           .energy_integral);
  }
  std::nth_element(energies.begin(), energies.begin() + 100, energies.end());
  const CutoffSpec cutoff{energies[100] - 0.5};

  for (const char* name : {"constant", "coordinate"}) {
    const Observable g = Observable::from_name(name);
    const auto bel =
        bel_gradient_mean(model, noise, cutoff, g, x0, h, horizon, dt, 20000, RngStream(3, 0));
    const double eps = 1e-2;
    auto lo = x0, hi = x0;
    lo[0] -= eps;
    hi[0] += eps;
    auto fd = direct_difference(model, noise, cutoff, g, lo, hi, horizon, dt, 4000,
                                RngStream(4, 0));
    fd.value /= 2 * eps;
    fd.std_error /= 2 * eps;
    const double combined = std::hypot(bel.std_error, fd.std_error);
    INFO(name << ": bel " << bel.value << " +- " << bel.std_error << ", fd " << fd.value
              << " +- " << fd.std_error);
    CHECK(std::abs(bel.value - fd.value) <= 3.0 * combined);
  }
}

TEST_CASE("gradient difference handles equal endpoints and reconstructs differences") {
  const auto model = shell4();
  const auto noise = NoiseSpec::constant(model, 2.0);
  const Observable g = Observable::from_name("coordinate");
  const std::vector<double> x1{0.3, 0.0, 0.0, 0.0}, x2{0.6, 0.1, 0.0, 0.0};
  const auto same = gradient_difference(model, noise, CutoffSpec{}, g, x1, x1, 0.3, 1e-3, 10, 3,
                                        RngStream(1, 0));
  CHECK(same.total.value == 0.0);
  const auto gd = gradient_difference(model, noise, CutoffSpec{}, g, x1, x2, 0.3, 1e-3, 6000, 3,
                                      RngStream(5, 0));
  REQUIRE(gd.thetas.size() == 3);
  const auto dd = direct_difference(model, noise, CutoffSpec{}, g, x1, x2, 0.3, 1e-3, 2000,
                                    RngStream(6, 0));
  const double combined = std::hypot(gd.total.std_error, dd.std_error);
  CHECK(std::abs(gd.total.value - dd.value) <= 3.0 * combined);
}
