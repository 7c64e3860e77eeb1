// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nsmix {

// Coefficients of a velocity field over a model's ordered basis.
using SpectralState = std::vector<double>;

enum class Parity : std::uint8_t { kCos = 0, kSin = 1 };

// A real, divergence-free trigonometric mode on the unit torus:
//   e(x) = sqrt(2) * p * cos(2 pi k.x)   or   sqrt(2) * p * sin(2 pi k.x)
// where p is a unit polarization vector orthogonal to k.
struct WaveMode {
  std::array<int, 3> wavevector{};
  int polarization = 0;
  Parity parity = Parity::kCos;
  std::array<double, 3> direction{};  // the polarization unit vector
};

// One stored tensor entry T[l][m][n] = (B(e_l, e_m), e_n).
struct TriadEntry {
  std::uint32_t l;
  std::uint32_t m;
  std::uint32_t n;
  double value;
};

enum class ModelKind { kTorus, kShell };

struct Forcing {
  double amplitude = 0.0;
  std::vector<std::size_t> modes;  // basis indices carrying the amplitude
};

struct ShellParams {
  int n_shells = 6;
  double coupling = 1.0;
  double mu1 = 1.0;     // first eigenvalue
  double lambda = 2.0;  // wavenumber ratio; eigenvalue ratio is lambda^2
};

// Finite Galerkin system: ordered basis, Stokes eigenvalues, viscosity,
// forcing and the sparse interaction tensor. Immutable once built.
class GalerkinModel {
 public:
  static GalerkinModel torus(int cutoff, double nu = 1.0, const Forcing& forcing = {});
  static GalerkinModel shell(const ShellParams& params, double nu = 1.0,
                             const Forcing& forcing = {});
  // Same basis, eigenvalues and forcing with the interaction tensor removed.
  GalerkinModel linearized() const;

  ModelKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return eigenvalues_.size(); }
  double viscosity() const noexcept { return nu_; }
  int cutoff() const noexcept { return cutoff_; }
  const ShellParams& shell_params() const noexcept { return shell_; }

  std::span<const WaveMode> modes() const noexcept { return modes_; }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  const SpectralState& forcing() const noexcept { return forcing_; }
  std::span<const TriadEntry> triads() const noexcept { return triads_; }

  void check_conforms(std::span<const double> u, const char* what) const;

 private:
  GalerkinModel() = default;
  void set_forcing(const Forcing& forcing);

  ModelKind kind_ = ModelKind::kShell;
  int cutoff_ = 0;
  ShellParams shell_{};
  double nu_ = 1.0;
  std::vector<WaveMode> modes_;
  std::vector<double> eigenvalues_;
  SpectralState forcing_;
  std::vector<TriadEntry> triads_;
};

// Entries with magnitude below this are not stored.
inline constexpr double kTriadDropTolerance = 1e-14;

GalerkinModel build_torus_model(int cutoff, double nu = 1.0, const Forcing& forcing = {});
GalerkinModel build_shell_model(int n_shells, double coupling);

// Closed-form value of (B(e_l, e_m), e_n) for three torus modes.
double torus_triad_value(const WaveMode& l, const WaveMode& m, const WaveMode& n);

double inner(std::span<const double> a, std::span<const double> b);

// n-th coefficient of B(u, v) is sum_{l,m} u_l v_m T[l][m][n].
SpectralState bilinear_B(const GalerkinModel& model, std::span<const double> u,
                         std::span<const double> v);
// out += scale * B(u, v); no allocation.
void accumulate_B(const GalerkinModel& model, std::span<const double> u,
                  std::span<const double> v, double scale, std::span<double> out);

SpectralState apply_A_power(const GalerkinModel& model, double s, std::span<const double> u);
// (sum_n mu_n^s u_n^2)^(1/2): s = 0 is |.|, s = 1 is ||.||, s = 2 is ||.||_2.
double sobolev_norm(const GalerkinModel& model, double s, std::span<const double> u);
double sobolev_norm_sq(const GalerkinModel& model, double s, std::span<const double> u);
// Keeps the first N coefficients in eigenvalue order.
SpectralState project(const GalerkinModel& model, std::size_t n, std::span<const double> u);

}  // namespace nsmix
