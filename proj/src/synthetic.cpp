#include "biss/synthetic.hpp"

#include "biss/error.hpp"
#include "biss/exact.hpp"
#include "biss/oracle.hpp"
#include "biss/rng.hpp"

namespace biss {

std::string to_string(Structure s) {
  switch (s) {
    case Structure::duplicate_blocks: return "duplicate_blocks";
    case Structure::rank1_noise: return "rank1_noise";
    case Structure::adversarial_all_necessary: return "adversarial_all_necessary";
    case Structure::random_uniform: return "random_uniform";
  }
  return "unknown";
}

Structure parse_structure(const std::string& name) {
  for (auto s : {Structure::duplicate_blocks, Structure::rank1_noise,
                 Structure::adversarial_all_necessary, Structure::random_uniform})
    if (to_string(s) == name) return s;
  throw Error("unknown structure '" + name + "'");
}

namespace {

std::vector<std::string> numbered(const char* prefix, std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

RtsmInstance wrap(const SyntheticSpec& spec, Eigen::MatrixXd values) {
  PerformanceMatrix m(numbered("v", spec.n_variants), numbered("t", spec.n_tests), std::move(values),
                      to_string(spec.structure));
  return RtsmInstance({std::move(m)}, CostVector::unit(spec.n_tests), spec.target_tau);
}

bool every_test_necessary(const RtsmInstance& instance) {
  const auto every = all_tests(instance.n_tests());
  FeasibilityOracle oracle(instance, every);
  for (auto t : every) {
    const auto rest = without(every, t);
    if (unit_weights_preserve_ranking(instance, rest)) return false;
    if (oracle.feasible(rest)) return false;
  }
  return true;
}

}  // namespace

RtsmInstance generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_variants < 2) throw Error("synthetic instances need at least two variants");
  if (spec.n_tests < 1) throw Error("synthetic instances need at least one test");
  if (spec.noise_scale < 0.0) throw Error("noise scale must be non-negative");
  Rng rng(spec.seed);
  const auto nv = static_cast<Eigen::Index>(spec.n_variants);
  const auto nt = static_cast<Eigen::Index>(spec.n_tests);
  Eigen::MatrixXd values(nv, nt);

  switch (spec.structure) {
    case Structure::duplicate_blocks: {
      if (spec.blocks < 1 || spec.blocks > spec.n_tests) throw Error("blocks must lie in [1, n_tests]");
      const auto nb = static_cast<Eigen::Index>(spec.blocks);
      Eigen::MatrixXd base(nv, nb);
      for (Eigen::Index b = 0; b < nb; ++b)
        for (Eigen::Index i = 0; i < nv; ++i) base(i, b) = 1.0 + rng.uniform();
      for (Eigen::Index j = 0; j < nt; ++j)
        for (Eigen::Index i = 0; i < nv; ++i)
          values(i, j) = base(i, j % nb) + (spec.noise_scale > 0.0 ? spec.noise_scale * rng.normal() : 0.0);
      return wrap(spec, std::move(values));
    }
    case Structure::rank1_noise: {
      Eigen::VectorXd a(nv), b(nt);
      for (Eigen::Index i = 0; i < nv; ++i) a(i) = 1.0 + rng.uniform();
      for (Eigen::Index j = 0; j < nt; ++j) b(j) = 1.0 + rng.uniform();
      for (Eigen::Index j = 0; j < nt; ++j)
        for (Eigen::Index i = 0; i < nv; ++i)
          values(i, j) = a(i) * b(j) + (spec.noise_scale > 0.0 ? spec.noise_scale * rng.normal() : 0.0);
      return wrap(spec, std::move(values));
    }
    case Structure::random_uniform: {
      for (Eigen::Index j = 0; j < nt; ++j)
        for (Eigen::Index i = 0; i < nv; ++i) values(i, j) = rng.uniform();
      return wrap(spec, std::move(values));
    }
    case Structure::adversarial_all_necessary: {
      for (int attempt = 0; attempt < 100; ++attempt) {
        Rng local = rng.split(static_cast<std::uint64_t>(attempt));
        if (nv > nt) {
          for (Eigen::Index j = 0; j < nt; ++j) values(0, j) = 1.0 + local.uniform();
          for (Eigen::Index t = 0; t < nt; ++t) {
            values.row(t + 1) = values.row(0);
            values(t + 1, t) += 0.5 + 0.5 * local.uniform();
          }
          for (Eigen::Index i = nt + 1; i < nv; ++i)
            for (Eigen::Index j = 0; j < nt; ++j) values(i, j) = 1.0 + local.uniform();
        } else {
          for (Eigen::Index j = 0; j < nt; ++j)
            for (Eigen::Index i = 0; i < nv; ++i) values(i, j) = local.uniform();
        }
        RtsmInstance candidate = wrap(spec, values);
        if (every_test_necessary(candidate)) return candidate;
      }
      throw Error("could not build an all-necessary instance in 100 attempts");
    }
  }
  throw Error("unknown structure");
}

}  // namespace biss
