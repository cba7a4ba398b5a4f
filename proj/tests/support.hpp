#pragma once

#include <cmath>
#include <functional>

#include "corram/rng.hpp"

namespace test_support {

// Richardson-extrapolated central difference, O(h^4).
inline double richardson_derivative(const std::function<double(double)>& f, double x,
                                    double h) {
  const auto central = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

// Deterministic uniform draw for hand-rolled property loops.
inline double u01(std::uint64_t seed, std::uint64_t i) {
  return corram::rng::uniform01(seed, i);
}

inline double uniform(std::uint64_t seed, std::uint64_t i, double lo, double hi) {
  return lo + (hi - lo) * u01(seed, i);
}

}  // namespace test_support
