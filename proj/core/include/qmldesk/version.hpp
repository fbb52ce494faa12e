#pragma once

namespace qmldesk {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qmldesk
