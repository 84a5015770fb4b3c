#pragma once

#include <exception>
#include <mutex>

#ifdef HPS_HAVE_OPENMP
#include <omp.h>
#endif

namespace hps {

/// Number of worker threads used by leaf-parallel loops.
int thread_count();
void set_thread_count(int threads);

/// Runs body(i) for i in [0, count) across leaves. The first exception thrown
/// by any iteration is rethrown after the loop completes.
template <typename Body>
void parallel_for(long count, Body&& body) {
  std::exception_ptr failure;
  std::mutex guard;
#ifdef HPS_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (long i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Index of the calling thread inside parallel_for, 0 when serial.
inline int thread_index() {
#ifdef HPS_HAVE_OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

}  // namespace hps
