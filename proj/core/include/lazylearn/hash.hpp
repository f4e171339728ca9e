#pragma once

#include <cstdint>
#include <string>

namespace lazylearn {

// FNV-1a over a byte range; used for dataset fingerprints in manifests.
std::uint64_t fnv1a64(const void* data, std::size_t size);

// Hash of a file's full contents. Throws io_error when unreadable.
std::uint64_t fnv1a64_file(const std::string& path);

std::string to_hex(std::uint64_t value);

} // namespace lazylearn
