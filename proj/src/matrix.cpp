#include "biss/matrix.hpp"

#include <cmath>
#include <unordered_set>

#include "biss/error.hpp"

namespace biss {

namespace {

void require_unique(const std::vector<std::string>& ids, const char* axis) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids)
    if (!seen.insert(id).second) throw Error(std::string("duplicate ") + axis + " id '" + id + "'");
}

}  // namespace

PerformanceMatrix::PerformanceMatrix(std::vector<std::string> variant_ids,
                                     std::vector<std::string> test_ids, Eigen::MatrixXd values,
                                     std::string metric_name)
    : variant_ids_(std::move(variant_ids)),
      test_ids_(std::move(test_ids)),
      values_(std::move(values)),
      metric_name_(std::move(metric_name)) {
  if (static_cast<std::size_t>(values_.rows()) != variant_ids_.size() ||
      static_cast<std::size_t>(values_.cols()) != test_ids_.size())
    throw Error("matrix '" + metric_name_ + "' is " + std::to_string(values_.rows()) + "x" +
                std::to_string(values_.cols()) + " but has " +
                std::to_string(variant_ids_.size()) + " variant ids and " +
                std::to_string(test_ids_.size()) + " test ids");
  require_unique(variant_ids_, "variant");
  require_unique(test_ids_, "test");
  for (Eigen::Index j = 0; j < values_.cols(); ++j)
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
      if (!std::isfinite(values_(i, j)))
        throw Error("non-finite value for variant '" + variant_ids_[i] + "' on test '" +
                    test_ids_[j] + "' in metric '" + metric_name_ + "'");
  test_lookup_.reserve(test_ids_.size());
  for (std::size_t j = 0; j < test_ids_.size(); ++j) test_lookup_.emplace(test_ids_[j], j);
}

std::optional<std::size_t> PerformanceMatrix::find_test(const std::string& id) const {
  auto it = test_lookup_.find(id);
  if (it == test_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t PerformanceMatrix::test_index(const std::string& id) const {
  auto found = find_test(id);
  if (!found) throw Error("unknown test '" + id + "'");
  return *found;
}

PerformanceMatrix PerformanceMatrix::restrict_variants(const std::vector<std::size_t>& rows) const {
  std::vector<std::string> ids;
  Eigen::MatrixXd sub(rows.size(), values_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= n_variants()) throw Error("variant index out of range");
    ids.push_back(variant_ids_[rows[r]]);
    sub.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
  }
  return PerformanceMatrix(std::move(ids), test_ids_, std::move(sub), metric_name_);
}

PerformanceMatrix PerformanceMatrix::restrict_tests(const TestSubset& columns) const {
  std::vector<std::string> ids;
  Eigen::MatrixXd sub(values_.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] >= n_tests()) throw Error("test index out of range");
    ids.push_back(test_ids_[columns[c]]);
    sub.col(static_cast<Eigen::Index>(c)) = values_.col(static_cast<Eigen::Index>(columns[c]));
  }
  return PerformanceMatrix(variant_ids_, std::move(ids), std::move(sub), metric_name_);
}

CostVector::CostVector(std::vector<double> costs) : costs_(std::move(costs)) {
  bool any_positive = false;
  for (double c : costs_) {
    if (!std::isfinite(c) || c < 0.0) throw Error("test costs must be finite and non-negative");
    any_positive = any_positive || c > 0.0;
  }
  if (!any_positive) throw Error("at least one test cost must be positive");
}

double CostVector::total() const {
  double sum = 0.0;
  for (double c : costs_) sum += c;
  return sum;
}

double CostVector::of(const TestSubset& tests) const {
  double sum = 0.0;
  for (auto t : tests) sum += costs_.at(t);
  return sum;
}

CostVector CostVector::restrict_tests(const TestSubset& columns) const {
  std::vector<double> sub;
  sub.reserve(columns.size());
  for (auto c : columns) sub.push_back(costs_.at(c));
  return CostVector(std::move(sub));
}

RtsmInstance::RtsmInstance(std::vector<PerformanceMatrix> matrices, CostVector costs,
                           double target_tau)
    : matrices_(std::move(matrices)), costs_(std::move(costs)), target_tau_(target_tau) {
  if (matrices_.empty()) throw Error("an instance needs at least one metric matrix");
  const auto& first = matrices_.front();
  for (const auto& m : matrices_) {
    if (m.variant_ids() != first.variant_ids())
      throw Error("metric '" + m.metric_name() + "' disagrees on variant ids");
    if (m.test_ids() != first.test_ids())
      throw Error("metric '" + m.metric_name() + "' disagrees on test ids");
  }
  if (first.n_variants() < 2) throw Error("an instance needs at least two variants");
  if (first.n_tests() < 1) throw Error("an instance needs at least one test");
  if (costs_.size() != first.n_tests()) throw Error("cost vector does not cover every test");
  if (!(target_tau_ >= -1.0 && target_tau_ <= 1.0)) throw Error("target tau must lie in [-1, 1]");
}

RtsmInstance RtsmInstance::restrict_variants(const std::vector<std::size_t>& rows) const {
  std::vector<PerformanceMatrix> sub;
  for (const auto& m : matrices_) sub.push_back(m.restrict_variants(rows));
  return RtsmInstance(std::move(sub), costs_, target_tau_);
}

RtsmInstance RtsmInstance::restrict_tests(const TestSubset& columns) const {
  std::vector<PerformanceMatrix> sub;
  for (const auto& m : matrices_) sub.push_back(m.restrict_tests(columns));
  return RtsmInstance(std::move(sub), costs_.restrict_tests(columns), target_tau_);
}

RtsmInstance RtsmInstance::with_target(double target_tau) const {
  return RtsmInstance(matrices_, costs_, target_tau);
}

}  // namespace biss
