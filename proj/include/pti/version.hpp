#pragma once

namespace pti {
inline constexpr const char* version = "0.1.0";
}
