#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace mvsde {

// Process-wide cap on worker threads used by parallel_for. 0 = hardware default.
void set_max_threads(int n);
int max_threads();

// Runs body(i) for i in [0, n). Work is split into contiguous chunks; each
// index is independent so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Fixed-tree pairwise summation. The reduction order depends only on the
// length, so serial and chunked callers agree bit-for-bit.
double pairwise_sum(std::span<const double> v);

inline double pairwise_mean(std::span<const double> v) {
  return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace mvsde
