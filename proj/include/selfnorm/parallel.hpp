#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "selfnorm/errors.hpp"

namespace selfnorm {

inline constexpr const char* kThreadsEnv = "SELFNORM_LAB_THREADS";

/// Explicit request wins; otherwise SELFNORM_LAB_THREADS; otherwise the
/// hardware concurrency. Never returns less than 1.
inline unsigned resolve_threads(int requested = 0) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw parameter_error(std::string(kThreadsEnv) + " must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for every i in [0, count) on up to `threads` workers using a
/// static contiguous partition. Bodies must write only to slot i of their
/// outputs; results then do not depend on the thread count.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, const Body& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = count * t / threads;
      const std::size_t end = count * (t + 1) / threads;
      workers.emplace_back([&, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i) body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace selfnorm
