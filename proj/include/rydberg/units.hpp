#pragma once

#include <cmath>

namespace rydberg {

/// Time in atomic units (hbar / E_h).
struct TimeAu {
  double value = 0.0;
};

/// Time in nanoseconds.
struct TimeNs {
  double value = 0.0;
};

/// CODATA atomic unit of time, in seconds.
inline constexpr double kAtomicTimeSeconds = 2.4188843265857e-17;
inline constexpr double kNsPerAtomicTime = kAtomicTimeSeconds / 1e-9;

constexpr TimeNs au_to_ns(TimeAu t) { return TimeNs{t.value * kNsPerAtomicTime}; }
constexpr TimeAu ns_to_au(TimeNs t) { return TimeAu{t.value / kNsPerAtomicTime}; }

constexpr TimeAu operator+(TimeAu a, TimeAu b) { return TimeAu{a.value + b.value}; }
constexpr TimeAu operator*(double s, TimeAu t) { return TimeAu{s * t.value}; }
constexpr TimeAu operator/(TimeAu t, double s) { return TimeAu{t.value / s}; }
constexpr double operator/(TimeAu a, TimeAu b) { return a.value / b.value; }

constexpr TimeNs operator+(TimeNs a, TimeNs b) { return TimeNs{a.value + b.value}; }

} // namespace rydberg
