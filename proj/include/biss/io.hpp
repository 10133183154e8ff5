#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biss/harness.hpp"

namespace biss {

/// Matrix CSV: first row holds the test ids (its first cell is a free-form
/// corner label), every further row is a variant id followed by one value per
/// test. Diagnostics name the source and line.
PerformanceMatrix read_matrix_csv(std::istream& in, const std::string& source,
                                  const std::string& metric_name, bool negate = false);
PerformanceMatrix read_matrix_csv(const std::string& path, const std::string& metric_name = "",
                                  bool negate = false);
void write_matrix_csv(const PerformanceMatrix& matrix, std::ostream& out);

/// Cost CSV: one "test_id,cost" row per test, with an optional header row.
CostVector read_costs_csv(std::istream& in, const std::string& source,
                          const std::vector<std::string>& test_ids);
void write_costs_csv(const std::vector<std::string>& test_ids, const CostVector& costs,
                     std::ostream& out);

enum class CostSource { unit, file, mean_runtime };
CostSource parse_cost_source(const std::string& name);

struct IngestOptions {
  std::vector<std::string> matrix_paths;
  /// Metric names; defaults to the file stems.
  std::vector<std::string> metric_names;
  /// Negate a metric at load time (for lower-is-better metrics). Empty means none.
  std::vector<bool> negate;
  CostSource cost_source = CostSource::unit;
  std::string cost_path;
  /// Metric whose raw (un-negated) per-test mean across variants is the cost.
  std::size_t runtime_metric = 0;
  double target_tau = 1.0;
};

RtsmInstance ingest(const IngestOptions& options);

/// Solution JSON: {"cost", "method", "seed", "tau", "tests": [ids in test
/// order], "weights": {metric: {test id: weight}}}. Keys are sorted.
nlohmann::json solution_to_json(const RtsmInstance& instance, const Solution& solution);

struct LoadedSolution {
  std::vector<std::string> tests;
  std::map<std::string, std::map<std::string, double>> weights;
  double tau = 0.0;
  double cost = 0.0;
  std::string method;
  std::uint64_t seed = 0;
};

LoadedSolution solution_from_json(const nlohmann::json& j);

struct VerifyResult {
  bool ok = false;
  double tau = -1.0;
  double cost = 0.0;
  std::string message;
};

/// Recomputes tau and cost of a stored solution from the instance alone.
VerifyResult verify_solution(const RtsmInstance& instance, const LoadedSolution& solution);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

void write_records_csv(const std::vector<EvalRecord>& records, std::ostream& out);
std::vector<EvalRecord> read_records_csv(std::istream& in, const std::string& source);
void write_cdf_csv(const std::vector<CdfPoint>& points, std::ostream& out);

nlohmann::json study_report_json(const StudyReport& report);
void write_study_report_text(const StudyReport& report, std::ostream& out);

}  // namespace biss
