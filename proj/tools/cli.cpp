#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "biss/error.hpp"
#include "biss/io.hpp"
#include "biss/synthetic.hpp"

namespace biss::cli {

namespace fs = std::filesystem;

namespace {

std::size_t default_workers() {
  if (const char* env = std::getenv("BISS_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

/// Flags shared by every subcommand that loads an instance.
struct InstanceFlags {
  std::vector<std::string> matrices;
  std::vector<std::string> metric_names;
  std::vector<std::size_t> negate;
  std::string cost_source = "unit";
  std::string cost_path;
  std::size_t runtime_metric = 0;
  double target_tau = 1.0;

  void add_to(CLI::App* app) {
    app->add_option("-m,--matrix", matrices, "Metric CSV (rows variants, columns tests); repeat per metric")
        ->required()
        ->allow_extra_args(false)
        ->check(CLI::ExistingFile);
    app->add_option("--metric-name", metric_names, "Metric names, one per --matrix (default: file stem)");
    app->add_option("--negate", negate, "Indices of lower-is-better metrics to negate on load");
    app->add_option("--cost-source", cost_source, "unit | file | mean-runtime")
        ->check(CLI::IsMember({"unit", "file", "mean-runtime"}));
    app->add_option("--costs", cost_path, "Cost CSV (test_id,cost); implies --cost-source file");
    app->add_option("--runtime-metric", runtime_metric, "Metric index used for mean-runtime costs");
    app->add_option("-t,--target-tau", target_tau, "Kendall tau every metric must reach")
        ->check(CLI::Range(-1.0, 1.0));
  }

  RtsmInstance load() const {
    IngestOptions opt;
    opt.matrix_paths = matrices;
    opt.metric_names = metric_names;
    if (!negate.empty()) {
      opt.negate.assign(matrices.size(), false);
      for (auto k : negate) {
        if (k >= matrices.size()) throw Error("--negate index " + std::to_string(k) + " out of range");
        opt.negate[k] = true;
      }
    }
    opt.cost_source = cost_path.empty() ? parse_cost_source(cost_source) : CostSource::file;
    opt.cost_path = cost_path;
    opt.runtime_metric = runtime_metric;
    opt.target_tau = target_tau;
    return ingest(opt);
  }
};

struct SolverFlags {
  std::string n_splits = "auto";
  double deadline = 60.0;
  std::size_t max_merge_retries = 3;
  std::size_t workers = default_workers();
  double ridge = 0.0;
  bool clamp_negative = false;
  std::string greedy_aggregate = "min";
  std::string exact_command;

  void add_to(CLI::App* app) {
    app->add_option("--n-splits", n_splits, "Divide-and-conquer chunk count, or 'auto' (ceil(tests / 64))");
    app->add_option("--deadline", deadline, "Wall-clock seconds per run")->check(CLI::PositiveNumber);
    app->add_option("--max-merge-retries", max_merge_retries, "Resamples before a merge falls back")
        ->check(CLI::PositiveNumber);
    app->add_option("--workers", workers, "Worker threads (default: $BISS_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    app->add_option("--ridge", ridge, "Ridge parameter for the weight fit (default 0)")
        ->check(CLI::NonNegativeNumber);
    app->add_flag("--clamp-negative", clamp_negative, "Clamp negative fitted weights to zero");
    app->add_option("--greedy-aggregate", greedy_aggregate, "min | mean across metrics")
        ->check(CLI::IsMember({"min", "mean"}));
    app->add_option("--exact-command", exact_command,
                    "External MILP command for method 'exact' with {problem} and {solution} placeholders");
  }

  MethodConfig config(const fs::path& work_dir) const {
    MethodConfig c;
    c.deadline_seconds = deadline;
    if (n_splits != "auto") {
      try {
        const long n = std::stol(n_splits);
        if (n < 1) throw Error("");
        c.n_splits = static_cast<std::size_t>(n);
      } catch (const std::exception&) {
        throw Error("--n-splits must be a positive integer or 'auto'");
      }
    }
    c.max_merge_retries = max_merge_retries;
    c.workers = workers;
    c.oracle.ridge = ridge;
    c.oracle.clamp_negative = clamp_negative;
    c.greedy_aggregate = greedy_aggregate == "mean" ? VarianceAggregate::mean : VarianceAggregate::min;
    if (!exact_command.empty()) {
      c.exact.backend = ExactBackendKind::external;
      c.exact.external_command = exact_command;
      c.exact.work_dir = work_dir.string();
    }
    return c;
  }
};

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  fn(out);
}

int cmd_minimize(const InstanceFlags& inst, const SolverFlags& solver, const std::string& method,
                 const std::vector<std::uint64_t>& seeds, const std::string& out_dir, std::ostream& out) {
  if (!is_known_method(method)) throw Error("unknown method '" + method + "'");
  RtsmInstance instance = inst.load();
  if (method == "exact" && instance.target_tau() != 1.0) throw Error("exact backend supports tau = 1 only");
  fs::create_directories(out_dir);
  const MethodConfig config = solver.config(out_dir);

  std::vector<Solution> solutions;
  std::vector<double> reductions;
  bool stalled_timeout = false;
  for (auto seed : seeds) {
    Solution s = run_method(instance, method, seed, config);
    const double cr = cost_reduction(instance, s.tests);
    reductions.push_back(cr);
    stalled_timeout = stalled_timeout || (s.timed_out && cr == 0.0);
    write_json(fs::path(out_dir) / ("solution_" + method + "_seed" + std::to_string(seed) + ".json"),
               solution_to_json(instance, s));
    out << method << " seed " << seed << ": kept " << s.tests.size() << "/" << instance.n_tests()
        << " tests, cost " << format_double(s.total_cost) << ", tau " << format_double(s.achieved_tau)
        << (s.timed_out ? " (deadline reached)" : "") << "\n";
    solutions.push_back(std::move(s));
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < solutions.size(); ++k)
    if (preferable(solutions[k].tests, solutions[best].tests, instance)) best = k;
  Summary red = summarize(reductions);
  nlohmann::json summary;
  summary["method"] = method;
  summary["seeds"] = seeds;
  summary["n_tests"] = instance.n_tests();
  summary["n_variants"] = instance.n_variants();
  summary["target_tau"] = instance.target_tau();
  summary["best"] = solution_to_json(instance, solutions[best]);
  summary["best_cost_ratio"] = solutions[best].total_cost / instance.costs().total();
  summary["cost_reduction"] = {{"mean", red.mean}, {"ci95_half", red.ci95_half}, {"min", red.min}, {"max", red.max}};
  write_json(fs::path(out_dir) / "summary.json", summary);
  out << "best cost ratio " << format_double(solutions[best].total_cost / instance.costs().total())
      << ", mean cost reduction " << format_double(red.mean) << " ± " << format_double(red.ci95_half) << "\n";
  return stalled_timeout ? 2 : 0;
}

int cmd_verify(const InstanceFlags& inst, const std::vector<std::string>& files, std::ostream& out) {
  RtsmInstance instance = inst.load();
  bool all_ok = true;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open solution file " + file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(file + ": " + e.what());
    }
    VerifyResult r = verify_solution(instance, solution_from_json(j));
    out << (r.ok ? "PASS " : "FAIL ") << file << ": " << r.message << " (tau " << format_double(r.tau)
        << ", cost " << format_double(r.cost) << ")\n";
    all_ok = all_ok && r.ok;
  }
  return all_ok ? 0 : 1;
}

std::vector<StudyInstance> default_synthetic_suite(std::size_t count, std::uint64_t seed) {
  std::vector<StudyInstance> suite;
  const Structure kinds[] = {Structure::duplicate_blocks, Structure::rank1_noise, Structure::random_uniform};
  for (std::size_t k = 0; k < count; ++k) {
    SyntheticSpec spec;
    spec.structure = kinds[k % 3];
    spec.n_variants = 12;
    spec.n_tests = 32;
    spec.blocks = 4;
    spec.noise_scale = spec.structure == Structure::random_uniform ? 0.0 : 0.01;
    spec.seed = seed + k;
    suite.push_back({to_string(spec.structure) + "_" + std::to_string(k), generate_synthetic(spec)});
  }
  return suite;
}

void emit_study_outputs(const std::vector<EvalRecord>& records, GroupField group, const fs::path& dir,
                        std::ostream& out) {
  fs::create_directories(dir);
  write_file(dir / "records.csv", [&](std::ostream& o) { write_records_csv(records, o); });
  write_file(dir / "cdf.csv", [&](std::ostream& o) { write_cdf_csv(cumulative_score_distribution(records, group), o); });
  StudyReport report = summarize_study(records);
  write_json(dir / "report.json", study_report_json(report));
  write_file(dir / "report.txt", [&](std::ostream& o) { write_study_report_text(report, o); });
  write_study_report_text(report, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ranking-preserving benchmark test-suite minimization"};
  app.require_subcommand(1);

  // minimize
  auto* minimize = app.add_subcommand("minimize", "Minimize a test suite across seeds");
  InstanceFlags min_inst;
  SolverFlags min_solver;
  std::string min_method = "biss";
  std::vector<std::uint64_t> min_seeds{0};
  std::string min_out;
  min_inst.add_to(minimize);
  min_solver.add_to(minimize);
  minimize->add_option("--method", min_method, "biss | random | greedy | pca | exact");
  minimize->add_option("--seeds", min_seeds, "Seeds to run")->expected(1, -1);
  minimize->add_option("-o,--out", min_out, "Output directory")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "Re-validate solution files against the input data");
  InstanceFlags ver_inst;
  std::vector<std::string> ver_files;
  ver_inst.add_to(verify);
  verify->add_option("solutions", ver_files, "Solution JSON files")->required()->check(CLI::ExistingFile);

  // study
  auto* study = app.add_subcommand("study", "Variant-subsampling study over several instances");
  std::vector<std::string> study_matrices;
  std::size_t study_synthetic = 0;
  std::uint64_t study_suite_seed = 0;
  std::vector<std::string> study_methods{"biss"};
  std::vector<std::uint64_t> study_seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<double> study_fractions{0.25, 0.5, 0.75, 1.0};
  double study_target = 1.0;
  bool study_refit = false;
  std::string study_group = "method";
  std::string study_out;
  SolverFlags study_solver;
  study->add_option("-m,--matrix", study_matrices, "Single-metric matrix CSVs, one benchmark each")
      ->check(CLI::ExistingFile);
  study->add_option("--synthetic", study_synthetic, "Add this many generated benchmarks");
  study->add_option("--suite-seed", study_suite_seed, "Seed for the generated benchmarks");
  study->add_option("--methods", study_methods, "Methods to compare")->expected(1, -1);
  study->add_option("--seeds", study_seeds, "Seeds (one variant subsample each)")->expected(1, -1);
  study->add_option("--fractions", study_fractions, "Variant fractions in (0, 1]")->expected(1, -1);
  study->add_option("-t,--target-tau", study_target, "Kendall target")->check(CLI::Range(-1.0, 1.0));
  study->add_flag("--refit-on-full", study_refit, "Refit weights on all variants before evaluation");
  study->add_option("--group-by", study_group, "CDF grouping: method | benchmark | fraction | seed");
  study->add_option("-o,--out", study_out, "Output directory")->required();
  study_solver.add_to(study);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic instance");
  SyntheticSpec synth_spec;
  std::string synth_structure = "random_uniform";
  std::string synth_out;
  std::string synth_costs;
  synth->add_option("--structure", synth_structure,
                    "duplicate_blocks | rank1_noise | adversarial_all_necessary | random_uniform");
  synth->add_option("--variants", synth_spec.n_variants, "Number of variants")->check(CLI::Range(2, 1 << 20));
  synth->add_option("--tests", synth_spec.n_tests, "Number of tests")->check(CLI::PositiveNumber);
  synth->add_option("--blocks", synth_spec.blocks, "Base columns for duplicate_blocks");
  synth->add_option("--noise", synth_spec.noise_scale, "Noise scale")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", synth_spec.seed, "Generator seed");
  synth->add_option("-o,--out", synth_out, "Matrix CSV to write")->required();
  synth->add_option("--costs-out", synth_costs, "Also write a unit cost CSV");

  // report
  auto* report = app.add_subcommand("report", "Summarize a study's records");
  std::string rep_records;
  std::string rep_json;
  std::string rep_cdf;
  std::string rep_group = "method";
  report->add_option("records", rep_records, "records.csv from 'study'")->required()->check(CLI::ExistingFile);
  report->add_option("--json", rep_json, "Write the report as JSON");
  report->add_option("--cdf", rep_cdf, "Write the score CDF as CSV");
  report->add_option("--group-by", rep_group, "CDF grouping: method | benchmark | fraction | seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*minimize) return cmd_minimize(min_inst, min_solver, min_method, min_seeds, min_out, out);
    if (*verify) return cmd_verify(ver_inst, ver_files, out);
    if (*study) {
      std::vector<StudyInstance> instances;
      for (const auto& path : study_matrices) {
        PerformanceMatrix m = read_matrix_csv(path);
        const auto n = m.n_tests();
        instances.push_back({fs::path(path).stem().string(),
                             RtsmInstance({std::move(m)}, CostVector::unit(n), study_target)});
      }
      for (auto& item : default_synthetic_suite(study_synthetic, study_suite_seed))
        instances.push_back({item.id, item.instance.with_target(study_target)});
      if (instances.empty()) throw Error("study needs --matrix files or --synthetic N");
      StudyConfig config;
      config.methods = study_methods;
      config.seeds = study_seeds;
      config.fractions = study_fractions;
      config.method = study_solver.config(study_out);
      config.method.workers = 1;
      config.workers = study_solver.workers;
      config.refit_on_full = study_refit;
      fs::create_directories(study_out);
      auto records = run_matrix_study(instances, config);
      for (const auto& r : records)
        if (r.skipped) err << "warning: " << r.benchmark_id << " fraction " << r.variant_fraction << ": " << r.note << "\n";
      emit_study_outputs(records, parse_group_field(study_group), study_out, out);
      return 0;
    }
    if (*synth) {
      synth_spec.structure = parse_structure(synth_structure);
      RtsmInstance instance = generate_synthetic(synth_spec);
      write_file(synth_out, [&](std::ostream& o) { write_matrix_csv(instance.matrix(0), o); });
      if (!synth_costs.empty())
        write_file(synth_costs, [&](std::ostream& o) { write_costs_csv(instance.test_ids(), instance.costs(), o); });
      out << "wrote " << synth_out << " (" << instance.n_variants() << " variants x " << instance.n_tests()
          << " tests)\n";
      return 0;
    }
    if (*report) {
      std::ifstream in(rep_records);
      if (!in) throw Error("cannot open " + rep_records);
      auto records = read_records_csv(in, rep_records);
      StudyReport rep = summarize_study(records);
      write_study_report_text(rep, out);
      if (!rep_json.empty()) write_json(rep_json, study_report_json(rep));
      if (!rep_cdf.empty())
        write_file(rep_cdf, [&](std::ostream& o) {
          write_cdf_csv(cumulative_score_distribution(records, parse_group_field(rep_group)), o);
        });
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace biss::cli
