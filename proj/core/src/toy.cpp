#include "lazylearn/toy.hpp"

#include "lazylearn/errors.hpp"
#include "lazylearn/rng.hpp"

#include <cmath>
#include <numbers>

namespace lazylearn {

bool ToyTaskSpec::separable() const {
    const double dx = center_a[0] - center_b[0];
    const double dy = center_a[1] - center_b[1];
    return std::hypot(dx, dy) > 2.0 * radius;
}

Dataset make_two_clouds(const ToyTaskSpec& spec) {
    if (spec.radius <= 0.0) {
        throw invalid_input("make_two_clouds: radius must be positive");
    }
    if (spec.n_per_class < 0) {
        throw invalid_input("make_two_clouds: n_per_class must be non-negative");
    }
    if (!spec.separable()) {
        throw invalid_input("make_two_clouds: discs overlap; no separating line exists");
    }

    const std::int64_t n = 2 * spec.n_per_class;
    Dataset out;
    out.n_classes = 2;
    out.features.resize(static_cast<Eigen::Index>(n), 2);
    out.labels.resize(static_cast<std::size_t>(n));
    out.sample_ids.resize(static_cast<std::size_t>(n));

    auto eng = make_engine(spec.seed, rng_stream::toy_data);
    // Two draws per point regardless of position, so the stream layout
    // is stable: radius via sqrt keeps the disc density uniform.
    auto fill_disc = [&](std::int64_t first_row, const std::array<double, 2>& center, int label) {
        for (std::int64_t i = 0; i < spec.n_per_class; ++i) {
            const double r = spec.radius * std::sqrt(uniform_unit(eng));
            const double theta = 2.0 * std::numbers::pi * uniform_unit(eng);
            const auto row = static_cast<Eigen::Index>(first_row + i);
            out.features(row, 0) = center[0] + r * std::cos(theta);
            out.features(row, 1) = center[1] + r * std::sin(theta);
            out.labels[static_cast<std::size_t>(first_row + i)] = label;
            out.sample_ids[static_cast<std::size_t>(first_row + i)] = first_row + i;
        }
    };
    fill_disc(0, spec.center_a, 0);
    fill_disc(spec.n_per_class, spec.center_b, 1);
    out.validate();
    return out;
}

} // namespace lazylearn
