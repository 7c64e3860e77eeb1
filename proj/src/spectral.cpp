// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <tuple>

#include "nsmix/error.hpp"

namespace nsmix {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 normalized(const Vec3& a) {
  const double n = std::sqrt(dot3(a, a));
  return {a[0] / n, a[1] / n, a[2] / n};
}

Vec3 as_vec(const std::array<int, 3>& k) {
  return {static_cast<double>(k[0]), static_cast<double>(k[1]), static_cast<double>(k[2])};
}

int norm_sq(const std::array<int, 3>& k) { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }

// One representative of each +-k pair: first nonzero component positive.
bool is_representative(const std::array<int, 3>& k) {
  for (int c : k) {
    if (c != 0) return c > 0;
  }
  return false;
}

std::array<Vec3, 2> polarizations(const std::array<int, 3>& k) {
  const Vec3 kv = as_vec(k);
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(k[i]) < std::abs(k[axis])) axis = i;
  }
  Vec3 ref{0.0, 0.0, 0.0};
  ref[axis] = 1.0;
  const Vec3 p0 = normalized(cross(kv, ref));
  const Vec3 p1 = normalized(cross(kv, p0));
  return {p0, p1};
}

// Coefficients a_s of a real trig factor written as sum_s a_s exp(i s theta).
// kind: 0 = cos, 1 = sin, 2 = -sin.
std::complex<double> trig_coefficient(int kind, int s) {
  using namespace std::complex_literals;
  switch (kind) {
    case 0:
      return 0.5;
    case 1:
      return -0.5i * static_cast<double>(s);
    default:
      return 0.5i * static_cast<double>(s);
  }
}

}  // namespace

double torus_triad_value(const WaveMode& l, const WaveMode& m, const WaveMode& n) {
  const double geometry = dot3(l.direction, as_vec(m.wavevector)) * dot3(m.direction, n.direction);
  if (geometry == 0.0) return 0.0;
  // (e_l . grad) e_m . e_n = 2 sqrt2 * 2 pi (p_l . k_m)(p_m . p_n) c_l c_m' c_n
  const int kind_l = l.parity == Parity::kCos ? 0 : 1;
  const int kind_m = m.parity == Parity::kCos ? 2 : 0;  // derivative of cos is -sin
  const int kind_n = n.parity == Parity::kCos ? 0 : 1;
  std::complex<double> integral = 0.0;
  for (int s1 : {-1, 1}) {
    for (int s2 : {-1, 1}) {
      for (int s3 : {-1, 1}) {
        bool resonant = true;
        for (int c = 0; c < 3; ++c) {
          if (s1 * l.wavevector[c] + s2 * m.wavevector[c] + s3 * n.wavevector[c] != 0) {
            resonant = false;
            break;
          }
        }
        if (resonant) {
          integral += trig_coefficient(kind_l, s1) * trig_coefficient(kind_m, s2) *
                      trig_coefficient(kind_n, s3);
        }
      }
    }
  }
  return 2.0 * std::numbers::sqrt2 * 2.0 * std::numbers::pi * geometry * integral.real();
}

GalerkinModel GalerkinModel::torus(int cutoff, double nu, const Forcing& forcing) {
  require(cutoff >= 1, ErrorCode::kInvalidArgument, "torus model: cutoff must be >= 1");
  require(std::isfinite(nu) && nu > 0.0, ErrorCode::kInvalidArgument,
          "torus model: viscosity must be positive");
  GalerkinModel model;
  model.kind_ = ModelKind::kTorus;
  model.cutoff_ = cutoff;
  model.nu_ = nu;

  const int r = static_cast<int>(std::floor(std::sqrt(static_cast<double>(cutoff))));
  std::vector<std::array<int, 3>> reps;
  for (int a = -r; a <= r; ++a) {
    for (int b = -r; b <= r; ++b) {
      for (int c = -r; c <= r; ++c) {
        const std::array<int, 3> k{a, b, c};
        const int k2 = norm_sq(k);
        if (k2 >= 1 && k2 <= cutoff && is_representative(k)) reps.push_back(k);
      }
    }
  }
  require(!reps.empty(), ErrorCode::kInvalidArgument, "torus model: cutoff yields no modes");
  std::sort(reps.begin(), reps.end(), [](const auto& x, const auto& y) {
    return std::make_tuple(norm_sq(x), x) < std::make_tuple(norm_sq(y), y);
  });

  for (const auto& k : reps) {
    const auto pols = polarizations(k);
    for (int p = 0; p < 2; ++p) {
      for (Parity parity : {Parity::kCos, Parity::kSin}) {
        model.modes_.push_back(WaveMode{k, p, parity, pols[static_cast<std::size_t>(p)]});
        model.eigenvalues_.push_back(4.0 * std::numbers::pi * std::numbers::pi * norm_sq(k));
      }
    }
  }

  const auto n_modes = static_cast<std::uint32_t>(model.modes_.size());
  for (std::uint32_t l = 0; l < n_modes; ++l) {
    for (std::uint32_t m = 0; m < n_modes; ++m) {
      for (std::uint32_t n = m + 1; n < n_modes; ++n) {
        const double v = torus_triad_value(model.modes_[l], model.modes_[m], model.modes_[n]);
        if (std::abs(v) < kTriadDropTolerance) continue;
        model.triads_.push_back({l, m, n, v});
        model.triads_.push_back({l, n, m, -v});
      }
    }
  }
  model.set_forcing(forcing);
  return model;
}

GalerkinModel GalerkinModel::shell(const ShellParams& params, double nu, const Forcing& forcing) {
  require(params.n_shells >= 3, ErrorCode::kInvalidArgument, "shell model: n_shells must be >= 3");
  require(params.mu1 > 0.0 && std::isfinite(params.mu1), ErrorCode::kInvalidArgument,
          "shell model: mu1 must be positive");
  require(params.lambda > 1.0 && std::isfinite(params.lambda), ErrorCode::kInvalidArgument,
          "shell model: lambda must exceed 1");
  require(std::isfinite(params.coupling), ErrorCode::kInvalidArgument,
          "shell model: coupling must be finite");
  require(std::isfinite(nu) && nu > 0.0, ErrorCode::kInvalidArgument,
          "shell model: viscosity must be positive");
  GalerkinModel model;
  model.kind_ = ModelKind::kShell;
  model.shell_ = params;
  model.nu_ = nu;
  const auto n = static_cast<std::uint32_t>(params.n_shells);
  std::vector<double> k(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    model.eigenvalues_.push_back(params.mu1 * std::pow(params.lambda, 2.0 * i));
    k[i] = std::sqrt(model.eigenvalues_.back());
  }
  // Nearest-neighbour triads (i, i+1, i+2). Each member l couples to the
  // other two (m < n) with weight alpha_l, stored as the antisymmetric pair
  // T[l][m][n] = alpha_l, T[l][n][m] = -alpha_l.
  if (params.coupling != 0.0) {
    for (std::uint32_t i = 0; i + 2 < n; ++i) {
      const double scale = params.coupling * k[i + 1];
      const std::array<std::uint32_t, 3> member{i, i + 1, i + 2};
      const std::array<double, 3> alpha{scale, -0.5 * scale, 0.25 * scale};
      for (int a = 0; a < 3; ++a) {
        std::uint32_t others[2];
        int o = 0;
        for (int b = 0; b < 3; ++b) {
          if (b != a) others[o++] = member[static_cast<std::size_t>(b)];
        }
        const double v = alpha[static_cast<std::size_t>(a)];
        model.triads_.push_back({member[static_cast<std::size_t>(a)], others[0], others[1], v});
        model.triads_.push_back({member[static_cast<std::size_t>(a)], others[1], others[0], -v});
      }
    }
  }
  model.set_forcing(forcing);
  return model;
}

GalerkinModel GalerkinModel::linearized() const {
  GalerkinModel copy = *this;
  copy.triads_.clear();
  return copy;
}

void GalerkinModel::set_forcing(const Forcing& forcing) {
  require(std::isfinite(forcing.amplitude), ErrorCode::kInvalidArgument,
          "forcing amplitude must be finite");
  forcing_.assign(size(), 0.0);
  for (std::size_t idx : forcing.modes) {
    require(idx < size(), ErrorCode::kInvalidArgument, "forcing mode index out of range");
    forcing_[idx] = forcing.amplitude;
  }
}

void GalerkinModel::check_conforms(std::span<const double> u, const char* what) const {
  if (u.size() != size()) {
    fail(ErrorCode::kDimensionMismatch, std::string(what) + ": state has " +
                                            std::to_string(u.size()) + " coefficients, model has " +
                                            std::to_string(size()));
  }
}

GalerkinModel build_torus_model(int cutoff, double nu, const Forcing& forcing) {
  return GalerkinModel::torus(cutoff, nu, forcing);
}

GalerkinModel build_shell_model(int n_shells, double coupling) {
  ShellParams p;
  p.n_shells = n_shells;
  p.coupling = coupling;
  return GalerkinModel::shell(p);
}

double inner(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::kDimensionMismatch, "inner: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void accumulate_B(const GalerkinModel& model, std::span<const double> u,
                  std::span<const double> v, double scale, std::span<double> out) {
  for (const TriadEntry& t : model.triads()) {
    out[t.n] += scale * t.value * u[t.l] * v[t.m];
  }
}

SpectralState bilinear_B(const GalerkinModel& model, std::span<const double> u,
                         std::span<const double> v) {
  model.check_conforms(u, "bilinear_B");
  model.check_conforms(v, "bilinear_B");
  SpectralState out(model.size(), 0.0);
  accumulate_B(model, u, v, 1.0, out);
  return out;
}

SpectralState apply_A_power(const GalerkinModel& model, double s, std::span<const double> u) {
  model.check_conforms(u, "apply_A_power");
  SpectralState out(u.begin(), u.end());
  if (s == 0.0) return out;
  const auto mu = model.eigenvalues();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::pow(mu[i], s);
  return out;
}

double sobolev_norm_sq(const GalerkinModel& model, double s, std::span<const double> u) {
  model.check_conforms(u, "sobolev_norm");
  const auto mu = model.eigenvalues();
  double acc = 0.0;
  if (s == 0.0) {
    for (double x : u) acc += x * x;
  } else if (s == 1.0 || s == 2.0 || s == 3.0) {
    const int p = static_cast<int>(s);
    for (std::size_t i = 0; i < u.size(); ++i) {
      double w = mu[i];
      for (int j = 1; j < p; ++j) w *= mu[i];
      acc += w * u[i] * u[i];
    }
  } else {
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::pow(mu[i], s) * u[i] * u[i];
  }
  return acc;
}

double sobolev_norm(const GalerkinModel& model, double s, std::span<const double> u) {
  return std::sqrt(sobolev_norm_sq(model, s, u));
}

SpectralState project(const GalerkinModel& model, std::size_t n, std::span<const double> u) {
  model.check_conforms(u, "project");
  require(n <= model.size(), ErrorCode::kInvalidArgument, "project: N exceeds mode count");
  SpectralState out(u.begin(), u.end());
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(n), out.end(), 0.0);
  return out;
}

}  // namespace nsmix
