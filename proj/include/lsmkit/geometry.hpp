#pragma once

#include <cmath>

namespace lsm {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

inline constexpr double kSpeedOfLight = 299792458.0;          // m/s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12; // F/m
inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Free-space wavenumber at frequency f [Hz].
inline double wavenumber(double f) { return 2.0 * kPi * f / kSpeedOfLight; }

} // namespace lsm
