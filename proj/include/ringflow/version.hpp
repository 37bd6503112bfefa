#pragma once

namespace ringflow {
inline constexpr const char* version = "0.1.0";
}
