#include "lazylearn/dataset.hpp"

#include "lazylearn/errors.hpp"

#include <string>

namespace lazylearn {

void Dataset::validate() const {
    const auto n = static_cast<std::int64_t>(labels.size());
    if (features.rows() != n) {
        throw consistency_error("dataset: " + std::to_string(features.rows()) +
                                " feature rows vs " + std::to_string(n) + " labels");
    }
    if (static_cast<std::int64_t>(sample_ids.size()) != n) {
        throw consistency_error("dataset: " + std::to_string(sample_ids.size()) +
                                " sample ids vs " + std::to_string(n) + " labels");
    }
    for (std::int64_t i = 0; i < n; ++i) {
        const int label = labels[static_cast<std::size_t>(i)];
        if (label < 0 || label >= n_classes) {
            throw consistency_error("dataset: label " + std::to_string(label) + " at row " +
                                    std::to_string(i) + " outside [0, " +
                                    std::to_string(n_classes) + ")");
        }
    }
}

Dataset subset_rows(const Dataset& data, const std::vector<std::int64_t>& rows) {
    Dataset out;
    out.n_classes = data.n_classes;
    out.image_rows = data.image_rows;
    out.image_cols = data.image_cols;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
    out.labels.reserve(rows.size());
    out.sample_ids.reserve(rows.size());
    Eigen::Index dst = 0;
    for (const std::int64_t row : rows) {
        if (row < 0 || row >= data.size()) {
            throw invalid_input("subset_rows: row " + std::to_string(row) + " out of range");
        }
        out.features.row(dst++) = data.features.row(static_cast<Eigen::Index>(row));
        out.labels.push_back(data.labels[static_cast<std::size_t>(row)]);
        out.sample_ids.push_back(data.sample_ids[static_cast<std::size_t>(row)]);
    }
    return out;
}

Dataset head(const Dataset& data, std::int64_t n) {
    if (n < 0 || n > data.size()) {
        throw invalid_input("head: n out of range");
    }
    std::vector<std::int64_t> rows(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        rows[static_cast<std::size_t>(i)] = i;
    }
    return subset_rows(data, rows);
}

} // namespace lazylearn
