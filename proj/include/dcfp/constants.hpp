#pragma once

namespace dcfp {

// Exact by SI definition.
inline constexpr double speed_of_light = 299792458.0;

inline constexpr double two_pi = 6.283185307179586476925286766559005768;
inline constexpr double pi = 3.141592653589793238462643383279502884;

inline constexpr const char* tool_version = "0.1.0";

} // namespace dcfp
