#pragma once

#include <cstdint>
#include <functional>

namespace lazylearn {

// Runs fn(chunk_index, begin, end) over [0, n) split into fixed-size
// chunks, distributed across up to `threads` workers (0 = hardware
// concurrency). The chunk grid depends only on n, so per-chunk results
// are identical for any thread count; callers that reduce must combine
// per-chunk partials in chunk order to stay deterministic.
void parallel_chunks(std::int64_t n, std::int64_t chunk_size,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn,
                     unsigned threads = 0);

} // namespace lazylearn
