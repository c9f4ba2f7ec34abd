#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace splitknock {

// Resolves the worker count: explicit flag value if > 0, else the
// SPLITKNOCK_THREADS environment variable, else 1.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPLITKNOCK_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

// Fork-join map over [0, n). Each task writes only to its own slot, so the
// result is identical whether the loop runs serially or under OpenMP; the
// serial branch is the reference implementation the tests compare against.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
#ifdef _OPENMP
  if (threads > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
#else
  (void)threads;
#endif
  for (int i = 0; i < n; ++i) fn(i);
}

template <typename Fn>
void serial_for(int n, Fn&& fn) {
  for (int i = 0; i < n; ++i) fn(i);
}

}  // namespace splitknock
