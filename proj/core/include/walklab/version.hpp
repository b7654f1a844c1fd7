#pragma once

namespace walklab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kGenerator = "splitmix64-ctr/v1";

} // namespace walklab
