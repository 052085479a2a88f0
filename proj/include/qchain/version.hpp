#pragma once

namespace qchain {

inline constexpr const char* kVersion = "0.1.0";

} // namespace qchain
