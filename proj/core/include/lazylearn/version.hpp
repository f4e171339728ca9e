#pragma once

namespace lazylearn {

inline constexpr const char* kVersion = "0.1.0";

} // namespace lazylearn
