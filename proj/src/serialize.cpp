// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/serialize.hpp"

#include <charconv>
#include <cmath>

#include "nsmix/error.hpp"

namespace nsmix {

using nlohmann::json;

json model_to_json(const GalerkinModel& model) {
  json j;
  j["kind"] = model.kind() == ModelKind::kTorus ? "torus" : "shell";
  j["size"] = model.size();
  j["nu"] = model.viscosity();
  if (model.kind() == ModelKind::kTorus) {
    j["cutoff"] = model.cutoff();
    json modes = json::array();
    for (const auto& m : model.modes()) {
      modes.push_back({{"k", m.wavevector},
                       {"polarization", m.polarization},
                       {"parity", m.parity == Parity::kCos ? "cos" : "sin"},
                       {"direction", m.direction}});
    }
    j["modes"] = std::move(modes);
  } else {
    const auto& p = model.shell_params();
    j["shells"] = p.n_shells;
    j["coupling"] = p.coupling;
    j["mu1"] = p.mu1;
    j["lambda"] = p.lambda;
  }
  j["eigenvalues"] = std::vector<double>(model.eigenvalues().begin(), model.eigenvalues().end());
  j["forcing"] = model.forcing();
  j["triad_entries"] = model.triads().size();
  return j;
}

json trajectory_to_json(const GalerkinModel& model, const TrajectoryRecord& traj,
                        std::size_t record_every) {
  require(record_every >= 1, ErrorCode::kInvalidArgument, "record_every must be >= 1");
  json j;
  j["schema"] = "nsmix.trajectory";
  j["schema_version"] = kTrajectorySchemaVersion;
  j["model"] = {{"kind", model.kind() == ModelKind::kTorus ? "torus" : "shell"},
                {"size", model.size()}};
  j["dt"] = traj.dt;
  j["scheme"] = to_string(traj.scheme);
  j["seed"] = traj.seed;
  j["stream"] = traj.stream;
  j["blew_up"] = traj.blew_up;
  j["record_every"] = record_every;
  json times = json::array(), states = json::array();
  const std::size_t n = traj.states.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % record_every == 0 || i + 1 == n) {
      times.push_back(traj.times[i]);
      states.push_back(traj.states[i]);
    }
  }
  j["times"] = std::move(times);
  j["states"] = std::move(states);
  return j;
}

json coupling_summary_json(const CouplingRecord& r) {
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  return {{"meeting_step", opt(r.meeting_step)},
          {"tau", opt(r.tau)},
          {"tau_l2", opt(r.tau_l2)},
          {"tau_sequence", r.tau_sequence},
          {"k0", opt(r.k0)},
          {"attempts", r.attempts},
          {"censored", r.censored},
          {"persistence_violations", r.persistence_violations},
          {"macro_steps", r.rows.size()}};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_json(const std::string& path, const json& document) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << document.dump(2) << '\n';
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path + "'");
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
  if (!out_) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::separator() {
  if (column_ >= columns_) fail(ErrorCode::kInvalidArgument, path_ + ": too many columns");
  if (column_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
  separator();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  if (column_ != columns_) fail(ErrorCode::kInvalidArgument, path_ + ": short row");
  out_ << '\n';
  column_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) fail(ErrorCode::kIo, "write failed for '" + path_ + "'");
}

void write_coupling_table(const std::string& path, const CouplingRecord& record) {
  CsvWriter csv(path, {"step", "time", "branch", "diff_l2", "met", "in_ball", "coupling_attempts"});
  for (const auto& row : record.rows) {
    csv << row.step << row.time << to_string(row.branch) << row.diff_l2 << row.met << row.in_ball
        << row.coupling_attempts;
    csv.end_row();
  }
  csv.close();
}

}  // namespace nsmix
