#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace riesz {

/// Worker count taken from RIESZ_LAB_THREADS. Unset: hardware concurrency.
/// 0 or 1: everything runs on the calling thread.
inline unsigned thread_count() {
  if (const char* env = std::getenv("RIESZ_LAB_THREADS")) {
    try {
      const long v = std::stol(env);
      return v <= 1 ? 1u : static_cast<unsigned>(v);
    } catch (...) {
      return 1u;
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for i in [0, n). Iterations must be independent.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

/// Sum of term(i) over [0, n) with a reduction tree that does not depend on
/// the number of threads: fixed-size chunks are summed left to right, then the
/// chunk totals are summed left to right. Results are bit-identical for any
/// RIESZ_LAB_THREADS setting.
template <typename Term>
double deterministic_sum(std::size_t n, Term&& term, std::size_t chunk = 1024) {
  const std::size_t chunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[c] = s;
  });
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace riesz
