#pragma once

namespace xbarsim {

// SI internally; these convert display units into SI.
inline constexpr double uS = 1e-6;
inline constexpr double uA = 1e-6;
inline constexpr double us = 1e-6;
inline constexpr double kOhm = 1e3;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool valid() const { return lo <= hi; }
    bool contains(double x) const { return x >= lo && x <= hi; }
    double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

}  // namespace xbarsim
