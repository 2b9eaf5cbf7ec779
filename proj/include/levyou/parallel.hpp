#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace levyou {

void set_thread_count(int n);
int thread_count();

// body(i) for i in [0,n). Each index must write only its own output slot;
// reductions are done afterwards in index order, so results do not depend
// on the thread count. The first exception thrown by any body is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr err;
  std::mutex m;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(m);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace levyou
