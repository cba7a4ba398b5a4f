#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "corram/common.hpp"

namespace corram {

// Runs body(i) for i in [0, n).  Each index is computed by exactly one worker
// into caller-owned slot i, so results are identical for any thread count.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (unsigned w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

// One sweep axis over a named numeric parameter.
struct AxisSpec {
  std::string key;
  double min = 0.0;
  double max = 0.0;
  int steps = 1;
  bool log_scale = false;

  double at(int i) const {
    if (steps == 1) return min;
    const double f = static_cast<double>(i) / (steps - 1);
    if (log_scale) {
      return min * std::pow(max / min, f);
    }
    return min + (max - min) * f;
  }

  void validate() const {
    if (key.empty()) throw validation_error("axis key must be set");
    if (steps < 1) throw validation_error("axis steps must be at least 1");
    if (steps > 1 && !(min < max)) throw validation_error("axis requires min < max");
    if (log_scale && !(min > 0.0)) throw validation_error("log axis requires min > 0");
  }
};

// Linearly or log spaced grid values.
inline std::vector<double> axis_values(const AxisSpec& axis) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(axis.steps));
  for (int i = 0; i < axis.steps; ++i) values.push_back(axis.at(i));
  return values;
}

}  // namespace corram
