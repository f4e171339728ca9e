#include "lazylearn/rng.hpp"

#include "lazylearn/errors.hpp"

#include <numeric>

namespace lazylearn {

std::vector<std::int64_t> shuffled_order(std::int64_t n, std::int64_t epoch, std::uint64_t seed) {
    if (n < 0) {
        throw invalid_input("shuffled_order: n must be non-negative");
    }
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), std::int64_t{0});
    auto eng = make_engine(seed, rng_stream::shuffle_base + static_cast<std::uint64_t>(epoch));
    for (std::int64_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::int64_t>(
            uniform_below(eng, static_cast<std::uint64_t>(i) + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    return order;
}

} // namespace lazylearn
