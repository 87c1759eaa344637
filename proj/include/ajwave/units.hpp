#pragma once

// All library code works in SI units (seconds, hertz, watts). The CLI and
// config layer speak nanoseconds / gigahertz / decibels; these helpers keep
// the conversions in one place.

namespace ajwave {

inline constexpr double ns_to_s(double ns) { return ns * 1e-9; }
inline constexpr double s_to_ns(double s) { return s * 1e9; }
inline constexpr double ghz_to_hz(double ghz) { return ghz * 1e9; }
inline constexpr double hz_to_ghz(double hz) { return hz * 1e-9; }

}  // namespace ajwave
