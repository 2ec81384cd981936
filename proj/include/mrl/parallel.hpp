#ifndef MRL_PARALLEL_HPP
#define MRL_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mrl {

/// Every kernel exists in a serial reference form and an OpenMP form.
/// Both must produce bit-identical results: parallel loops only ever write
/// to per-index slots, and reductions are performed serially in index order.
enum class ExecPolicy { Serial, Parallel };

void set_max_threads(int n);
int max_threads();

template <typename F>
void for_each_index(ExecPolicy policy, std::ptrdiff_t n, F&& f) {
  if (policy == ExecPolicy::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
  }
}

/// Like for_each_index, but exceptions never cross the parallel region:
/// the lowest-index exception is captured and rethrown afterwards, so the
/// error surfaced is the same regardless of scheduling.
template <typename F>
void for_each_index_checked(ExecPolicy policy, std::ptrdiff_t n, F&& f) {
  std::mutex mu;
  std::exception_ptr err;
  std::ptrdiff_t err_index = n;
  for_each_index(policy, n, [&](std::ptrdiff_t i) {
    try {
      f(i);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(mu);
      if (i < err_index) {
        err_index = i;
        err = std::current_exception();
      }
    }
  });
  if (err) std::rethrow_exception(err);
}

}  // namespace mrl

#endif
