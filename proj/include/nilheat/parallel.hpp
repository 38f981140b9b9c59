#pragma once
#include <algorithm>
#include <cstdint>
#include <vector>
#ifdef _OPENMP
#include <omp.h>
#endif

namespace nilheat {

// Deterministic parallel reduction.  The index range is cut into fixed-size
// chunks, each chunk is summed left to right, and the per-chunk partials are
// combined serially in chunk order.  The chunking does not depend on the
// thread count, so the result is bit-identical for any --workers setting.
inline constexpr std::int64_t kReduceChunk = 4096;

template <class T, class Term>
T chunked_reduce(std::int64_t n, Term&& term) {
  if (n <= 0) return T{};
  const std::int64_t nchunk = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<T> partial(static_cast<std::size_t>(nchunk));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t c = 0; c < nchunk; ++c) {
    const std::int64_t lo = c * kReduceChunk;
    const std::int64_t hi = std::min(n, lo + kReduceChunk);
    T acc{};
    for (std::int64_t i = lo; i < hi; ++i) acc += term(i);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

// Serial reference for the reduction above, kept for tests and benchmarks.
template <class T, class Term>
T serial_reduce(std::int64_t n, Term&& term) {
  T total{};
  for (std::int64_t i = 0; i < n; ++i) total += term(i);
  return total;
}

template <class Body>
void parallel_for(std::int64_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

inline int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_worker_count(int w) {
#ifdef _OPENMP
  if (w > 0) omp_set_num_threads(w);
#else
  (void)w;
#endif
}

}  // namespace nilheat
