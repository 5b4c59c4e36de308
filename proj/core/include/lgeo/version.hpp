#pragma once

namespace lgeo {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace lgeo
