#include "biss/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "biss/error.hpp"
#include "biss/ranking.hpp"

namespace biss {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Splits one CSV record; double quotes protect commas and "" escapes a quote.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bool parse_number(const std::string& text, double& value) {
  if (text.empty()) return false;
  const char* begin = text.data();
  if (*begin == '+') ++begin;
  auto [p, ec] = std::from_chars(begin, text.data() + text.size(), value);
  return ec == std::errc() && p == text.data() + text.size();
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

bool is_blank(const std::string& line) { return trim(line).empty(); }

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, p);
}

PerformanceMatrix read_matrix_csv(std::istream& in, const std::string& source,
                                  const std::string& metric_name, bool negate) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    header = split_csv(line);
    break;
  }
  if (header.size() < 2) throw Error(where(source, line_no) + "header needs a corner cell and at least one test id");
  std::vector<std::string> test_ids(header.begin() + 1, header.end());
  {
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t j = 0; j < test_ids.size(); ++j) {
      if (test_ids[j].empty()) throw Error(where(source, line_no) + "empty test id in column " + std::to_string(j + 2));
      if (!seen.emplace(test_ids[j], j).second)
        throw Error(where(source, line_no) + "duplicate test id '" + test_ids[j] + "'");
    }
  }

  std::vector<std::string> variant_ids;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, std::size_t> seen_variants;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto fields = split_csv(line);
    if (fields.size() != header.size())
      throw Error(where(source, line_no) + "expected " + std::to_string(header.size()) + " fields, found " +
                  std::to_string(fields.size()));
    if (fields[0].empty()) throw Error(where(source, line_no) + "empty variant id");
    if (!seen_variants.emplace(fields[0], rows.size()).second)
      throw Error(where(source, line_no) + "duplicate variant id '" + fields[0] + "'");
    std::vector<double> row(test_ids.size());
    for (std::size_t j = 0; j < test_ids.size(); ++j) {
      double v = 0.0;
      if (!parse_number(fields[j + 1], v) || !std::isfinite(v))
        throw Error(where(source, line_no) + "non-finite or unparsable value '" + fields[j + 1] +
                    "' for test '" + test_ids[j] + "'");
      row[j] = negate ? -v : v;
    }
    variant_ids.push_back(fields[0]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(source + ": no variant rows");

  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(test_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < test_ids.size(); ++j)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return PerformanceMatrix(std::move(variant_ids), std::move(test_ids), std::move(values), metric_name);
}

PerformanceMatrix read_matrix_csv(const std::string& path, const std::string& metric_name, bool negate) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open matrix file " + path);
  const std::string name = metric_name.empty() ? std::filesystem::path(path).stem().string() : metric_name;
  return read_matrix_csv(in, path, name, negate);
}

void write_matrix_csv(const PerformanceMatrix& matrix, std::ostream& out) {
  out << "variant";
  for (const auto& t : matrix.test_ids()) out << ',' << quote_if_needed(t);
  out << '\n';
  for (std::size_t i = 0; i < matrix.n_variants(); ++i) {
    out << quote_if_needed(matrix.variant_ids()[i]);
    for (std::size_t j = 0; j < matrix.n_tests(); ++j) out << ',' << format_double(matrix(i, j));
    out << '\n';
  }
}

CostVector read_costs_csv(std::istream& in, const std::string& source,
                          const std::vector<std::string>& test_ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < test_ids.size(); ++j) index.emplace(test_ids[j], j);
  std::vector<double> costs(test_ids.size(), 0.0);
  std::vector<bool> seen(test_ids.size(), false);
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto fields = split_csv(line);
    if (fields.size() != 2) throw Error(where(source, line_no) + "expected 'test_id,cost'");
    double c = 0.0;
    const bool numeric = parse_number(fields[1], c);
    if (first && !numeric) {
      first = false;
      continue;  // header
    }
    first = false;
    if (!numeric || !std::isfinite(c) || c < 0.0)
      throw Error(where(source, line_no) + "cost must be a finite non-negative number");
    auto it = index.find(fields[0]);
    if (it == index.end()) throw Error(where(source, line_no) + "unknown test '" + fields[0] + "'");
    if (seen[it->second]) throw Error(where(source, line_no) + "duplicate cost for test '" + fields[0] + "'");
    seen[it->second] = true;
    costs[it->second] = c;
  }
  for (std::size_t j = 0; j < test_ids.size(); ++j)
    if (!seen[j]) throw Error(source + ": no cost for test '" + test_ids[j] + "'");
  return CostVector(std::move(costs));
}

void write_costs_csv(const std::vector<std::string>& test_ids, const CostVector& costs, std::ostream& out) {
  out << "test_id,cost\n";
  for (std::size_t j = 0; j < test_ids.size(); ++j)
    out << quote_if_needed(test_ids[j]) << ',' << format_double(costs[j]) << '\n';
}

CostSource parse_cost_source(const std::string& name) {
  if (name == "unit") return CostSource::unit;
  if (name == "file") return CostSource::file;
  if (name == "mean-runtime" || name == "mean_runtime") return CostSource::mean_runtime;
  throw Error("unknown cost source '" + name + "'");
}

RtsmInstance ingest(const IngestOptions& options) {
  if (options.matrix_paths.empty()) throw Error("at least one matrix file is required");
  if (!options.negate.empty() && options.negate.size() != options.matrix_paths.size())
    throw Error("give one negate flag per matrix file");
  if (!options.metric_names.empty() && options.metric_names.size() != options.matrix_paths.size())
    throw Error("give one metric name per matrix file");

  std::vector<PerformanceMatrix> matrices;
  std::vector<PerformanceMatrix> raw_runtime;
  for (std::size_t k = 0; k < options.matrix_paths.size(); ++k) {
    const auto& path = options.matrix_paths[k];
    const std::string name = options.metric_names.empty() ? "" : options.metric_names[k];
    const bool negate = !options.negate.empty() && options.negate[k];
    PerformanceMatrix m = read_matrix_csv(path, name, negate);
    if (!matrices.empty()) {
      const auto& first = matrices.front();
      if (m.n_tests() != first.n_tests())
        throw Error(path + ": has " + std::to_string(m.n_tests()) + " test columns, " +
                    options.matrix_paths.front() + " has " + std::to_string(first.n_tests()));
      for (std::size_t j = 0; j < m.n_tests(); ++j)
        if (m.test_ids()[j] != first.test_ids()[j])
          throw Error(path + ": test column " + std::to_string(j + 1) + " is '" + m.test_ids()[j] +
                      "' but " + options.matrix_paths.front() + " has '" + first.test_ids()[j] + "'");
      if (m.variant_ids() != first.variant_ids())
        throw Error(path + ": variant rows differ from " + options.matrix_paths.front());
      for (const auto& other : matrices)
        if (other.metric_name() == m.metric_name())
          throw Error(path + ": duplicate metric name '" + m.metric_name() + "'");
    }
    matrices.push_back(std::move(m));
  }

  const auto& test_ids = matrices.front().test_ids();
  std::optional<CostVector> costs;
  switch (options.cost_source) {
    case CostSource::unit: costs = CostVector::unit(test_ids.size()); break;
    case CostSource::file: {
      if (options.cost_path.empty()) throw Error("cost source 'file' needs a cost file");
      std::ifstream in(options.cost_path);
      if (!in) throw Error("cannot open cost file " + options.cost_path);
      costs = read_costs_csv(in, options.cost_path, test_ids);
      break;
    }
    case CostSource::mean_runtime: {
      if (options.runtime_metric >= matrices.size()) throw Error("runtime metric index out of range");
      const auto& m = matrices[options.runtime_metric];
      const double sign = !options.negate.empty() && options.negate[options.runtime_metric] ? -1.0 : 1.0;
      std::vector<double> c(test_ids.size());
      for (std::size_t j = 0; j < test_ids.size(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m.n_variants(); ++i) sum += sign * m(i, j);
        c[j] = sum / static_cast<double>(m.n_variants());
      }
      costs = CostVector(std::move(c));
      break;
    }
  }
  return RtsmInstance(std::move(matrices), std::move(*costs), options.target_tau);
}

nlohmann::json solution_to_json(const RtsmInstance& instance, const Solution& solution) {
  nlohmann::json j;
  std::vector<std::string> ids;
  for (auto t : solution.tests) ids.push_back(instance.test_ids().at(t));
  j["tests"] = ids;
  nlohmann::json weights = nlohmann::json::object();
  for (std::size_t m = 0; m < instance.n_metrics(); ++m) {
    nlohmann::json per = nlohmann::json::object();
    for (std::size_t k = 0; k < solution.tests.size(); ++k) per[ids[k]] = solution.weights.at(m).at(k);
    weights[instance.matrix(m).metric_name()] = per;
  }
  j["weights"] = weights;
  j["tau"] = solution.achieved_tau;
  j["cost"] = solution.total_cost;
  j["method"] = solution.method;
  j["seed"] = solution.seed;
  return j;
}

LoadedSolution solution_from_json(const nlohmann::json& j) {
  LoadedSolution s;
  try {
    s.tests = j.at("tests").get<std::vector<std::string>>();
    for (const auto& [metric, per] : j.at("weights").items())
      for (const auto& [id, w] : per.items()) s.weights[metric][id] = w.get<double>();
    s.tau = j.at("tau").get<double>();
    s.cost = j.at("cost").get<double>();
    s.method = j.at("method").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed solution file: ") + e.what());
  }
  return s;
}

VerifyResult verify_solution(const RtsmInstance& instance, const LoadedSolution& solution) {
  VerifyResult r;
  if (solution.tests.empty()) {
    r.message = "solution selects no tests";
    return r;
  }
  TestSubset tests;
  for (const auto& id : solution.tests) tests.push_back(instance.matrix(0).test_index(id));
  if (canonical(tests).size() != tests.size()) {
    r.message = "solution lists a test twice";
    return r;
  }
  double worst = 1.0;
  bool meets = true;
  for (const auto& m : instance.matrices()) {
    auto it = solution.weights.find(m.metric_name());
    if (it == solution.weights.end()) {
      r.message = "no weights for metric '" + m.metric_name() + "'";
      return r;
    }
    KendallCounts k = kendall_counts(full_ranking(m), weighted_ranking(m, solution.tests, it->second));
    worst = std::min(worst, k.tau());
    meets = meets && k.meets(instance.target_tau());
  }
  r.tau = worst;
  r.cost = instance.costs().of(canonical(tests));
  if (!meets) {
    r.message = "tau " + format_double(worst) + " below target " + format_double(instance.target_tau());
    return r;
  }
  if (r.cost != solution.cost) {
    r.message = "stored cost " + format_double(solution.cost) + " differs from recomputed " + format_double(r.cost);
    return r;
  }
  if (r.tau != solution.tau) {
    r.message = "stored tau " + format_double(solution.tau) + " differs from recomputed " + format_double(r.tau);
    return r;
  }
  r.ok = true;
  r.message = "ok";
  return r;
}

void write_records_csv(const std::vector<EvalRecord>& records, std::ostream& out) {
  out << "benchmark_id,method,seed,variant_fraction,cost_reduction,tau_on_full,score,wall_seconds,"
         "timed_out,iterations,n_variants_used,n_selected,skipped,note\n";
  for (const auto& r : records) {
    out << quote_if_needed(r.benchmark_id) << ',' << quote_if_needed(r.method) << ',' << r.seed << ','
        << format_double(r.variant_fraction) << ',' << format_double(r.cost_reduction) << ','
        << format_double(r.tau_on_full) << ',' << format_double(r.score) << ','
        << format_double(r.wall_seconds) << ',' << (r.timed_out ? 1 : 0) << ',' << r.iterations << ','
        << r.n_variants_used << ',' << r.n_selected << ',' << (r.skipped ? 1 : 0) << ','
        << quote_if_needed(r.note) << '\n';
  }
}

std::vector<EvalRecord> read_records_csv(std::istream& in, const std::string& source) {
  std::vector<EvalRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto fields = split_csv(line);
    if (header.empty()) {
      header = fields;
      continue;
    }
    if (fields.size() != header.size()) throw Error(where(source, line_no) + "wrong field count");
    std::unordered_map<std::string, std::string> f;
    for (std::size_t k = 0; k < header.size(); ++k) f[header[k]] = fields[k];
    auto num = [&](const char* key) {
      double v = 0.0;
      if (!parse_number(f[key], v)) throw Error(where(source, line_no) + "bad value for " + key);
      return v;
    };
    EvalRecord r;
    r.benchmark_id = f["benchmark_id"];
    r.method = f["method"];
    r.seed = static_cast<std::uint64_t>(num("seed"));
    r.variant_fraction = num("variant_fraction");
    r.cost_reduction = num("cost_reduction");
    r.tau_on_full = num("tau_on_full");
    r.score = num("score");
    r.wall_seconds = num("wall_seconds");
    r.timed_out = num("timed_out") != 0.0;
    r.iterations = static_cast<std::size_t>(num("iterations"));
    r.n_variants_used = static_cast<std::size_t>(num("n_variants_used"));
    r.n_selected = static_cast<std::size_t>(num("n_selected"));
    r.skipped = num("skipped") != 0.0;
    r.note = f["note"];
    records.push_back(std::move(r));
  }
  return records;
}

void write_cdf_csv(const std::vector<CdfPoint>& points, std::ostream& out) {
  out << "group,score,cdf\n";
  for (const auto& p : points)
    out << quote_if_needed(p.group) << ',' << format_double(p.score) << ',' << format_double(p.cdf) << '\n';
}

namespace {

nlohmann::json summary_json(const Summary& s) {
  return {{"n", s.n},           {"mean", s.mean},       {"stddev", s.stddev}, {"ci95_half", s.ci95_half},
          {"min", s.min},       {"median", s.median},   {"max", s.max}};
}

}  // namespace

nlohmann::json study_report_json(const StudyReport& report) {
  nlohmann::json j;
  j["methods"] = nlohmann::json::array();
  for (const auto& m : report.methods)
    j["methods"].push_back({{"method", m.method},
                            {"records", m.records},
                            {"timeouts", m.timeouts},
                            {"cost_reduction", summary_json(m.cost_reduction)},
                            {"tau", summary_json(m.tau)},
                            {"score", summary_json(m.score)}});
  j["comparisons"] = nlohmann::json::array();
  for (const auto& c : report.comparisons)
    j["comparisons"].push_back({{"better", c.better},
                                {"worse", c.worse},
                                {"pairs", c.pairs},
                                {"w_plus", c.score_test.w_plus},
                                {"w_minus", c.score_test.w_minus},
                                {"z", c.score_test.z},
                                {"p_value", c.score_test.p_value},
                                {"rank_biserial", c.score_test.rank_biserial}});
  return j;
}

void write_study_report_text(const StudyReport& report, std::ostream& out) {
  out << std::fixed << std::setprecision(4);
  out << "method      n   timeouts  cost_reduction (±95%)   tau      score (±95%)\n";
  for (const auto& m : report.methods) {
    out << std::left << std::setw(10) << m.method << std::right << std::setw(4) << m.records
        << std::setw(10) << m.timeouts << "  " << m.cost_reduction.mean << " ± "
        << m.cost_reduction.ci95_half << "     " << m.tau.mean << "   " << m.score.mean << " ± "
        << m.score.ci95_half << "\n";
  }
  if (!report.comparisons.empty()) {
    out << "\none-sided Wilcoxon signed-rank on score (H1: first > second)\n";
    for (const auto& c : report.comparisons)
      out << "  " << c.better << " > " << c.worse << ": pairs=" << c.pairs
          << " p=" << c.score_test.p_value << " r=" << c.score_test.rank_biserial << "\n";
  }
  out.unsetf(std::ios::floatfield);
}

}  // namespace biss
