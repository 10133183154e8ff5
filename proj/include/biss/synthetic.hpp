#pragma once

#include <cstdint>
#include <string>

#include "biss/matrix.hpp"

namespace biss {

enum class Structure { duplicate_blocks, rank1_noise, adversarial_all_necessary, random_uniform };

std::string to_string(Structure s);
Structure parse_structure(const std::string& name);

struct SyntheticSpec {
  std::size_t n_variants = 10;
  std::size_t n_tests = 16;
  Structure structure = Structure::random_uniform;
  double noise_scale = 0.0;
  std::uint64_t seed = 0;
  /// Distinct base columns for duplicate_blocks; test j copies block j % blocks.
  std::size_t blocks = 1;
  double target_tau = 1.0;
};

/// Desk-scale instance generator with unit test costs.
///
/// adversarial_all_necessary needs n_variants > n_tests: variant 0 and
/// variant t + 1 agree on every test except t, where t + 1 is better, so
/// dropping any test ties that pair and the index tie-break misorders it.
/// Every instance is certified by brute force before it is returned.
RtsmInstance generate_synthetic(const SyntheticSpec& spec);

}  // namespace biss
