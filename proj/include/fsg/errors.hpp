#pragma once

#include <stdexcept>
#include <string>

namespace fsg {

// Bad arguments from the caller: out-of-domain points, size mismatches,
// inconsistent configuration.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Something that should not fail did: a factorization broke down, Newton
// did not converge.
class NumericalDefect : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fsg
