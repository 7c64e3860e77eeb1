// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsmix/coupling.hpp"
#include "nsmix/integrator.hpp"
#include "nsmix/spectral.hpp"

namespace nsmix {

inline constexpr int kTrajectorySchemaVersion = 1;

nlohmann::json model_to_json(const GalerkinModel& model);

// Every record_every-th state plus the final one.
nlohmann::json trajectory_to_json(const GalerkinModel& model, const TrajectoryRecord& trajectory,
                                  std::size_t record_every = 1);

nlohmann::json coupling_summary_json(const CouplingRecord& record);

// Shortest text that parses back to the same double.
std::string format_double(double v);

void write_json(const std::string& path, const nlohmann::json& document);

// Comma-separated table with a header row.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(bool v) { return *this << static_cast<long long>(v ? 1 : 0); }
  CsvWriter& operator<<(const std::string& v);
  CsvWriter& operator<<(const char* v) { return *this << std::string(v); }
  void end_row();
  void close();

 private:
  void separator();

  std::string path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t column_ = 0;
};

void write_coupling_table(const std::string& path, const CouplingRecord& record);

}  // namespace nsmix
