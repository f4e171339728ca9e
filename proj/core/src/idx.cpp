#include "lazylearn/idx.hpp"

#include "lazylearn/errors.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

namespace lazylearn {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803; // u8 tensor, 3 dims
constexpr std::uint32_t kLabelsMagic = 0x00000801; // u8 tensor, 1 dim

std::vector<std::uint8_t> read_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) {
        throw io_error("cannot open " + path);
    }
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::vector<std::uint8_t> bytes(size);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) {
        throw io_error("error while reading " + path);
    }
    return bytes;
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& compressed,
                                 const std::string& path) {
    z_stream strm{};
    if (inflateInit2(&strm, 15 + 32) != Z_OK) { // auto-detect gzip/zlib wrapper
        throw io_error("zlib init failed for " + path);
    }
    std::vector<std::uint8_t> out;
    std::vector<std::uint8_t> buf(1 << 16);
    strm.next_in = const_cast<Bytef*>(compressed.data());
    strm.avail_in = static_cast<uInt>(compressed.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        strm.next_out = buf.data();
        strm.avail_out = static_cast<uInt>(buf.size());
        rc = inflate(&strm, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&strm);
            throw io_error("corrupt gzip stream in " + path);
        }
        out.insert(out.end(), buf.data(), buf.data() + (buf.size() - strm.avail_out));
        if (rc != Z_STREAM_END && strm.avail_in == 0 && strm.avail_out != 0) {
            inflateEnd(&strm);
            throw io_error("truncated gzip stream in " + path);
        }
    }
    inflateEnd(&strm);
    return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    auto bytes = read_raw(path);
    if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) {
        return gunzip(bytes, path);
    }
    return bytes;
}

class Cursor {
public:
    Cursor(const std::vector<std::uint8_t>& bytes, std::string path)
        : bytes_(bytes), path_(std::move(path)) {}

    std::uint32_t read_u32_be() {
        if (pos_ + 4 > bytes_.size()) {
            throw io_error("truncated header in " + path_);
        }
        const std::uint32_t v = (std::uint32_t{bytes_[pos_]} << 24) |
                                (std::uint32_t{bytes_[pos_ + 1]} << 16) |
                                (std::uint32_t{bytes_[pos_ + 2]} << 8) |
                                std::uint32_t{bytes_[pos_ + 3]};
        pos_ += 4;
        return v;
    }

    const std::uint8_t* payload(std::size_t count) {
        if (pos_ + count > bytes_.size()) {
            throw io_error("truncated payload in " + path_ + ": expected " +
                           std::to_string(count) + " bytes, have " +
                           std::to_string(bytes_.size() - pos_));
        }
        return bytes_.data() + pos_;
    }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

void write_u32_be(std::ofstream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>((v >> 24) & 0xff), static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 8) & 0xff), static_cast<char>(v & 0xff)};
    out.write(bytes, 4);
}

} // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path, bool transpose) {
    const auto image_bytes = read_file(images_path);
    Cursor images(image_bytes, images_path);
    const std::uint32_t image_magic = images.read_u32_be();
    if (image_magic != kImagesMagic) {
        throw format_error("bad magic in " + images_path + ": expected 0x00000803");
    }
    const std::uint32_t n_images = images.read_u32_be();
    std::uint32_t rows = images.read_u32_be();
    std::uint32_t cols = images.read_u32_be();

    const auto label_bytes = read_file(labels_path);
    Cursor labels(label_bytes, labels_path);
    const std::uint32_t label_magic = labels.read_u32_be();
    if (label_magic != kLabelsMagic) {
        throw format_error("bad magic in " + labels_path + ": expected 0x00000801");
    }
    const std::uint32_t n_labels = labels.read_u32_be();
    if (n_images != n_labels) {
        throw consistency_error("image/label count mismatch: " + std::to_string(n_images) +
                                " images vs " + std::to_string(n_labels) + " labels");
    }

    const std::size_t dims = static_cast<std::size_t>(rows) * cols;
    const std::uint8_t* pixels = images.payload(static_cast<std::size_t>(n_images) * dims);
    const std::uint8_t* label_data = labels.payload(n_labels);

    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(n_images), static_cast<Eigen::Index>(dims));
    out.labels.resize(n_labels);
    out.sample_ids.resize(n_labels);

    for (std::size_t i = 0; i < n_images; ++i) {
        const std::uint8_t* src = pixels + i * dims;
        double* dst = out.features.row(static_cast<Eigen::Index>(i)).data();
        if (!transpose) {
            for (std::size_t p = 0; p < dims; ++p) {
                dst[p] = static_cast<double>(src[p]) / 255.0;
            }
        } else {
            // Stored image is the transpose of the intended one.
            for (std::uint32_t r = 0; r < cols; ++r) {
                for (std::uint32_t c = 0; c < rows; ++c) {
                    dst[static_cast<std::size_t>(r) * rows + c] =
                        static_cast<double>(src[static_cast<std::size_t>(c) * cols + r]) / 255.0;
                }
            }
        }
    }
    if (transpose) {
        std::swap(rows, cols);
    }

    int max_label = -1;
    for (std::size_t i = 0; i < n_labels; ++i) {
        out.labels[i] = static_cast<int>(label_data[i]);
        max_label = std::max(max_label, out.labels[i]);
        out.sample_ids[i] = static_cast<std::int64_t>(i);
    }
    out.n_classes = max_label + 1;
    out.image_rows = static_cast<int>(rows);
    out.image_cols = static_cast<int>(cols);
    out.validate();
    return out;
}

void save_idx(const Dataset& data, const std::string& images_path,
              const std::string& labels_path) {
    const std::int64_t dims = data.dims();
    if (data.image_rows <= 0 || data.image_cols <= 0 ||
        static_cast<std::int64_t>(data.image_rows) * data.image_cols != dims) {
        throw invalid_input("save_idx: dataset carries no image geometry");
    }

    std::ofstream images(images_path, std::ios::binary | std::ios::trunc);
    if (!images) {
        throw io_error("cannot open " + images_path + " for writing");
    }
    write_u32_be(images, kImagesMagic);
    write_u32_be(images, static_cast<std::uint32_t>(data.size()));
    write_u32_be(images, static_cast<std::uint32_t>(data.image_rows));
    write_u32_be(images, static_cast<std::uint32_t>(data.image_cols));
    std::vector<char> row_bytes(static_cast<std::size_t>(dims));
    for (std::int64_t i = 0; i < data.size(); ++i) {
        const double* src = data.features.row(static_cast<Eigen::Index>(i)).data();
        for (std::int64_t p = 0; p < dims; ++p) {
            const double scaled = src[p] * 255.0;
            const double rounded = std::nearbyint(scaled);
            if (std::abs(scaled - rounded) > 1e-9 || rounded < 0.0 || rounded > 255.0) {
                throw invalid_input("save_idx: feature values are not byte-backed");
            }
            row_bytes[static_cast<std::size_t>(p)] = static_cast<char>(rounded);
        }
        images.write(row_bytes.data(), static_cast<std::streamsize>(row_bytes.size()));
    }
    if (!images) {
        throw io_error("error while writing " + images_path);
    }

    std::ofstream labels(labels_path, std::ios::binary | std::ios::trunc);
    if (!labels) {
        throw io_error("cannot open " + labels_path + " for writing");
    }
    write_u32_be(labels, kLabelsMagic);
    write_u32_be(labels, static_cast<std::uint32_t>(data.size()));
    for (std::int64_t i = 0; i < data.size(); ++i) {
        const char b = static_cast<char>(data.labels[static_cast<std::size_t>(i)]);
        labels.write(&b, 1);
    }
    if (!labels) {
        throw io_error("error while writing " + labels_path);
    }
}

} // namespace lazylearn
