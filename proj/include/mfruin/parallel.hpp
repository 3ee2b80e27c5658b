#pragma once

#include <functional>

namespace mfruin {

// Run body(begin, end) over a static partition of [0, count) across the given
// number of std::thread workers (0 = hardware concurrency). Each index is
// visited exactly once; callers write results into per-index slots so the
// outcome is identical for every worker count.
void parallel_for(long count, int threads,
                  const std::function<void(long, long)>& body);

}  // namespace mfruin
