#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace lazylearn {

// Row-major so that features.row(i) is a contiguous sample.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// An indexed collection of feature vectors with integer labels.
//
// sample_ids are the permanent identity of each row: shuffling during
// training reorders presentation only, and subsets (coresets) keep the
// ids of the rows they came from. Immutable after construction; safe to
// share across threads.
struct Dataset {
    FeatureMatrix features;               // n_samples x n_dims
    std::vector<int> labels;              // each in [0, n_classes)
    int n_classes = 0;
    std::vector<std::int64_t> sample_ids; // identity, not position

    // Image geometry when the data came from an image container
    // (needed to write it back out); 0 otherwise.
    int image_rows = 0;
    int image_cols = 0;

    std::int64_t size() const { return static_cast<std::int64_t>(labels.size()); }
    std::int64_t dims() const { return features.cols(); }

    // Throws consistency_error if the field lengths or label range disagree.
    void validate() const;
};

// Sub-dataset of the rows whose positions are listed in `rows`,
// preserving each row's original sample_id and the parent's n_classes.
Dataset subset_rows(const Dataset& data, const std::vector<std::int64_t>& rows);

// First n rows (deterministic head; used for size-capped experiments).
Dataset head(const Dataset& data, std::int64_t n);

} // namespace lazylearn
