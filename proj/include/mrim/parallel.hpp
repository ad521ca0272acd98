#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mrim {

inline int hardware_jobs() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs f(chunk_index, begin, end) over `items` split into a fixed number of
// chunks. The chunk layout depends only on (items, chunks), never on `jobs`,
// so per-chunk results merged in chunk order are identical for any worker
// count. Exceptions from workers are rethrown on the calling thread.
template <class F>
void parallel_chunks(std::size_t items, int jobs, std::size_t chunks, F&& f) {
  if (items == 0) return;
  if (chunks == 0) chunks = 1;
  if (chunks > items) chunks = items;
  const std::size_t base = items / chunks;
  const std::size_t rem = items % chunks;
  auto bounds = [&](std::size_t c) {
    std::size_t begin = c * base + (c < rem ? c : rem);
    std::size_t end = begin + base + (c < rem ? 1 : 0);
    return std::pair<std::size_t, std::size_t>{begin, end};
  };

  if (jobs <= 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [b, e] = bounds(c);
      f(c, b, e);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= chunks || failed.load()) return;
      auto [b, e] = bounds(c);
      try {
        f(c, b, e);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  std::size_t nthreads = static_cast<std::size_t>(jobs);
  if (nthreads > chunks) nthreads = chunks;
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (std::size_t i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mrim
