#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lgeo/marchenko_pastur.hpp"
#include "lgeo/phase.hpp"

namespace lgeo::io {

enum class ReportFormat { Json, Csv, Gnuplot };

ReportFormat parse_report_format(std::string_view name);

/// One row of per-layer diagnostics; fields a command does not compute stay empty.
struct LayerDiagnostics {
  std::string model_id;
  int layer = 0;
  std::optional<double> gamma;
  std::size_t n = 0;
  std::optional<double> omega_mean;
  std::optional<double> omega_var;
  std::optional<double> omega_min;
  std::optional<double> omega_max;
  std::optional<double> entropy;
  std::optional<double> effective_rank;
  std::optional<double> pr_dimension;
  std::optional<std::size_t> spike_count;
  std::optional<double> ks;

  bool operator==(const LayerDiagnostics&) const = default;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;

  bool operator==(const CheckResult&) const = default;
};

struct ReportDocument {
  std::string tool_version;
  std::string command;
  std::map<std::string, std::string> config;
  std::vector<LayerDiagnostics> layers;
  std::optional<phase::PhaseReport> phase;
  std::optional<rmt::MPModel> mp;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::pair<std::string, std::vector<double>>> series;
  std::vector<CheckResult> checks;

  bool all_checks_passed() const;
  bool operator==(const ReportDocument&) const = default;
};

std::string to_json(const ReportDocument& r, int indent = 2);
ReportDocument report_from_json(std::string_view text);

/// JSON is canonical. CSV and gnuplot hold the per-layer table only: CSV
/// with a header row, gnuplot with one '#' header line and
/// whitespace-separated columns ("nan" marks missing values).
std::string emit_report(const ReportDocument& r, ReportFormat format);

}  // namespace lgeo::io
