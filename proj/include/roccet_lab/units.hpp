#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace roccet_lab {

/// Simulation clock with 1 µs resolution. Time zero is the start of a run.
struct SimClock {
    using rep = std::int64_t;
    using period = std::micro;
    using duration = std::chrono::duration<rep, period>;
    using time_point = std::chrono::time_point<SimClock>;
    static constexpr bool is_steady = true;
};

using Duration = SimClock::duration;
using SimTime = SimClock::time_point;
using Seconds = std::chrono::duration<double>;

/// Window sizes, thresholds and ACK counts in MSS-sized segments.
using SegCount = double;

inline constexpr SimTime kSimStart{};

inline double to_seconds(Duration d) { return std::chrono::duration<double>(d).count(); }
inline double to_millis(Duration d) { return std::chrono::duration<double, std::milli>(d).count(); }
inline double seconds_since_start(SimTime t) { return to_seconds(t.time_since_epoch()); }
inline double millis_since_start(SimTime t) { return to_millis(t.time_since_epoch()); }

inline Duration from_seconds(double s) { return Duration(std::llround(s * 1e6)); }
inline Duration from_millis(double ms) { return Duration(std::llround(ms * 1e3)); }
inline SimTime at_seconds(double s) { return kSimStart + from_seconds(s); }

}  // namespace roccet_lab
