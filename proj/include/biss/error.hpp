#pragma once

#include <stdexcept>
#include <string>

namespace biss {

/// Thrown on invalid input or violated preconditions.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace biss
