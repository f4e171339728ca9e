#pragma once

#include "lazylearn/dataset.hpp"

#include <array>
#include <cstdint>

namespace lazylearn {

// Two-disc binary classification task in the plane. Class 0 fills the
// disc around center_a, class 1 the disc around center_b.
struct ToyTaskSpec {
    std::array<double, 2> center_a{-2.0, 0.0};
    std::array<double, 2> center_b{2.0, 0.0};
    double radius = 1.2;
    std::int64_t n_per_class = 100;
    std::uint64_t seed = 7;

    // Discs must not overlap; separation guarantees a linear separator
    // through the origin exists.
    bool separable() const;
};

// Samples n_per_class points uniformly inside each disc. Deterministic
// for a fixed seed. Labels: 0 for the center_a disc, 1 for center_b.
// Throws invalid_input when the discs overlap.
Dataset make_two_clouds(const ToyTaskSpec& spec);

} // namespace lazylearn
