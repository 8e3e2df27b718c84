#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace slp::detail {

// Below this many items per phase the spawn cost dominates.
inline constexpr std::size_t kMinParallelItems = 1 << 14;

/// Runs body(begin, end) over [0, n) split into contiguous static chunks.
/// Each index is handled by exactly one call, so per-item results do not
/// depend on the thread count.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads <= 1 || n < kMinParallelItems) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t t = std::min<std::size_t>(threads, n);
  const std::size_t chunk = (n + t - 1) / t;
  std::vector<std::jthread> workers;
  workers.reserve(t - 1);
  for (std::size_t w = 1; w < t; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    workers.emplace_back([&body, b, e] { body(b, e); });
  }
  body(std::size_t{0}, std::min(n, chunk));
}

}  // namespace slp::detail
