#pragma once

namespace pairloc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pairloc
