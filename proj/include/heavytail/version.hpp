#pragma once

namespace heavytail {

inline constexpr const char* version_string = "0.1.0";

}  // namespace heavytail
