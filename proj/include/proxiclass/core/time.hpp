#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace proxiclass {

// Millisecond-resolution UTC instant. All timestamps in the system use this.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// RFC 3339 in UTC ("2024-07-22T09:00:00Z"); fractional seconds are emitted
// only when the instant is not on a whole second.
std::string format_rfc3339(Timestamp ts);

// Accepts "YYYY-MM-DDTHH:MM:SS[.fff...](Z|+hh:mm|-hh:mm)"; 't'/' ' separators
// and lowercase 'z' are tolerated. Throws std::invalid_argument.
Timestamp parse_rfc3339(std::string_view text);

inline double seconds_between(Timestamp from, Timestamp to) {
  return std::chrono::duration<double>(to - from).count();
}

inline Timestamp add_seconds(Timestamp ts, double seconds) {
  return ts + std::chrono::round<std::chrono::milliseconds>(
                  std::chrono::duration<double>(seconds));
}

}  // namespace proxiclass
