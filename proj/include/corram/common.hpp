#pragma once

#include <stdexcept>
#include <string>

namespace corram {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// low word of double(pi); pi == pi_hi + pi_lo to ~1e-32
inline constexpr double pi_lo = 1.2246467991473531772e-16;

// Raised when an input violates a domain invariant.  The message names the
// offending field, e.g. "tau_r must be positive".
class validation_error : public std::invalid_argument {
public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// Raised for I/O and file-format failures.
class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace corram
