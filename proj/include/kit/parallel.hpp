#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace kit {

/// Requested worker count from a command-line flag; 0 means unset.
inline unsigned& thread_request() {
  static unsigned n = 0;
  return n;
}

/// Worker count: KIT_THREADS if set and positive, else the requested count,
/// else hardware concurrency.
inline unsigned thread_count() {
  if (const char* e = std::getenv("KIT_THREADS")) {
    try {
      int v = std::stoi(e);
      if (v > 0) return unsigned(v);
    } catch (...) {
    }
  }
  if (thread_request() > 0) return thread_request();
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1u : h;
}

/// Runs f(i) for i in [0,n). Work is handed out dynamically; callers write
/// results into slot i so the outcome does not depend on the schedule.
template <class F>
void parallel_for(std::size_t n, F&& f, unsigned threads = 0) {
  if (threads == 0) threads = thread_count();
  threads = unsigned(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex m;
  auto work = [&] {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
    } catch (...) {
      std::lock_guard<std::mutex> lk(m);
      if (!err) err = std::current_exception();
      next = n;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

} // namespace kit
