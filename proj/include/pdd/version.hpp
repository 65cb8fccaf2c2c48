#pragma once

namespace pdd {

inline constexpr const char* kVersion = "0.1.0";

} // namespace pdd
