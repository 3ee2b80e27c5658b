#include "mfruin/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace mfruin {

void parallel_for(long count, int threads,
                  const std::function<void(long, long)>& body) {
  if (count <= 0) return;
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(count));
  if (workers == 1) {
    body(0, count);
    return;
  }

  const long chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const long begin = w * chunk;
    const long end = std::min<long>(begin + chunk, count);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace mfruin
