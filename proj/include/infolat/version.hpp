#pragma once

namespace infolat {

inline constexpr const char* version = "0.1.0";

}  // namespace infolat
