#pragma once

#include <stdexcept>
#include <string>

namespace mfruin {

// Bad user-supplied configuration or parameter domain (CLI exit code 2).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Algorithmic failure on admissible inputs: solver breakdown, indefinite
// factorization, negative circulant eigenvalue, divergent integral
// (CLI exit code 3).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace mfruin
