#pragma once

namespace patchvar {

inline constexpr const char* version = "0.1.0";

} // namespace patchvar
