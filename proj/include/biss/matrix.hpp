#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "biss/test_set.hpp"

namespace biss {

/// Dense variants x tests matrix of one performance metric.
///
/// Rows are variants and columns are tests. Higher values are better; callers
/// ingesting lower-is-better metrics negate them first. All entries are finite
/// and identifiers are unique within each axis.
class PerformanceMatrix {
public:
  PerformanceMatrix(std::vector<std::string> variant_ids, std::vector<std::string> test_ids,
                    Eigen::MatrixXd values, std::string metric_name = "metric");

  const std::vector<std::string>& variant_ids() const { return variant_ids_; }
  const std::vector<std::string>& test_ids() const { return test_ids_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::string& metric_name() const { return metric_name_; }

  std::size_t n_variants() const { return variant_ids_.size(); }
  std::size_t n_tests() const { return test_ids_.size(); }

  double operator()(std::size_t variant, std::size_t test) const { return values_(variant, test); }

  std::optional<std::size_t> find_test(const std::string& id) const;
  std::size_t test_index(const std::string& id) const;  // throws "unknown test"

  PerformanceMatrix restrict_variants(const std::vector<std::size_t>& rows) const;
  PerformanceMatrix restrict_tests(const TestSubset& columns) const;

private:
  std::vector<std::string> variant_ids_;
  std::vector<std::string> test_ids_;
  Eigen::MatrixXd values_;
  std::string metric_name_;
  std::unordered_map<std::string, std::size_t> test_lookup_;
};

/// Non-negative per-test costs aligned with the canonical test order.
class CostVector {
public:
  explicit CostVector(std::vector<double> costs);
  static CostVector unit(std::size_t n_tests) { return CostVector(std::vector<double>(n_tests, 1.0)); }

  std::size_t size() const { return costs_.size(); }
  double operator[](std::size_t test) const { return costs_[test]; }
  const std::vector<double>& values() const { return costs_; }

  double total() const;
  double of(const TestSubset& tests) const;

  CostVector restrict_tests(const TestSubset& columns) const;

private:
  std::vector<double> costs_;
};

/// One or more metric matrices over a shared variant and test axis, plus the
/// Kendall target every metric has to reach.
class RtsmInstance {
public:
  RtsmInstance(std::vector<PerformanceMatrix> matrices, CostVector costs, double target_tau);

  const std::vector<PerformanceMatrix>& matrices() const { return matrices_; }
  const PerformanceMatrix& matrix(std::size_t metric) const { return matrices_[metric]; }
  const CostVector& costs() const { return costs_; }
  double target_tau() const { return target_tau_; }

  std::size_t n_metrics() const { return matrices_.size(); }
  std::size_t n_variants() const { return matrices_.front().n_variants(); }
  std::size_t n_tests() const { return matrices_.front().n_tests(); }
  const std::vector<std::string>& test_ids() const { return matrices_.front().test_ids(); }
  const std::vector<std::string>& variant_ids() const { return matrices_.front().variant_ids(); }

  RtsmInstance restrict_variants(const std::vector<std::size_t>& rows) const;
  RtsmInstance restrict_tests(const TestSubset& columns) const;
  RtsmInstance with_target(double target_tau) const;

private:
  std::vector<PerformanceMatrix> matrices_;
  CostVector costs_;
  double target_tau_;
};

}  // namespace biss
