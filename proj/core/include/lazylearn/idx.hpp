#pragma once

#include "lazylearn/dataset.hpp"

#include <string>

namespace lazylearn {

// IDX container as used by the classic digit benchmarks: big-endian
// magic (0x00000803 for u8 image tensors, 0x00000801 for u8 label
// vectors), big-endian dimension header, raw byte payload. Files may be
// gzip-compressed; that is detected by the 0x1f 0x8b prefix.

// Loads an image/label file pair. Pixel bytes map to doubles as
// byte/255.0; labels stay integral. `transpose` flips each image's
// row/column order (some derived datasets store images transposed).
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 bool transpose = false);

// Writes `data` back out as an uncompressed IDX pair. Requires image
// geometry (image_rows * image_cols == dims) and feature values that
// are exact multiples of 1/255, i.e. data that came from an IDX file.
void save_idx(const Dataset& data, const std::string& images_path,
              const std::string& labels_path);

} // namespace lazylearn
