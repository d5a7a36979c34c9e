#pragma once

#include <functional>

namespace banditvote {

// Runs body(i) for i in [begin, end), split across up to `threads` workers.
// Bodies must write only to disjoint, index-owned locations so the chunking
// cannot affect results.
void parallel_for(long begin, long end, int threads,
                  const std::function<void(long)>& body);

// 0 means auto: the BANDITVOTE_THREADS environment variable if set,
// otherwise the hardware concurrency.
int resolve_threads(int requested);

}  // namespace banditvote
