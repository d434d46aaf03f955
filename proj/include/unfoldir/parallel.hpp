#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "unfoldir/errors.hpp"

namespace unfoldir {

// Worker cap: UNFOLDIR_THREADS, 0 or unset meaning all hardware threads.
inline int worker_threads() {
  const char* env = std::getenv("UNFOLDIR_THREADS");
  long n = 0;
  if (env && *env) {
    char* end = nullptr;
    n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 0)
      throw ConfigError("UNFOLDIR_THREADS must be a nonnegative integer");
  }
  if (n == 0) n = static_cast<long>(std::thread::hardware_concurrency());
  return n > 0 ? static_cast<int>(n) : 1;
}

// Index-parallel loop over [0, count). Each index owns its output slot, so
// results are bitwise independent of the schedule; the lowest-index exception
// wins, keeping failures deterministic too.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  if (count <= 0) return;
  const int workers = std::min(count, worker_threads());
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (std::thread& th : pool) th.join();
  for (int i = 0; i < count; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

}  // namespace unfoldir
