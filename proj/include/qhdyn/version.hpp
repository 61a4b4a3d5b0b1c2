#pragma once

namespace qhdyn {
inline constexpr const char* kVersion = "0.1.0";
}
