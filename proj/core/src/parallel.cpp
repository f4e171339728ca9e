#include "lazylearn/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace lazylearn {

void parallel_chunks(std::int64_t n, std::int64_t chunk_size,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn,
                     unsigned threads) {
    if (n <= 0) {
        return;
    }
    chunk_size = std::max<std::int64_t>(1, chunk_size);
    const std::int64_t n_chunks = (n + chunk_size - 1) / chunk_size;
    unsigned want = threads != 0 ? threads : std::thread::hardware_concurrency();
    want = std::max(1u, std::min<unsigned>(want, static_cast<unsigned>(n_chunks)));

    auto run_chunk = [&](std::int64_t c) {
        const std::int64_t begin = c * chunk_size;
        const std::int64_t end = std::min(n, begin + chunk_size);
        fn(c, begin, end);
    };

    if (want == 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) {
            run_chunk(c);
        }
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(want);
    for (unsigned t = 0; t < want; ++t) {
        pool.emplace_back([&] {
            for (std::int64_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
                run_chunk(c);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

} // namespace lazylearn
