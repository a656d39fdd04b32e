#include "proxiclass/core/time.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace proxiclass {

using namespace std::chrono;

std::string format_rfc3339(Timestamp ts) {
  const auto day = floor<days>(ts);
  const year_month_day ymd{day};
  const hh_mm_ss<milliseconds> tod{ts - day};
  char buf[40];
  const long long ms = tod.subseconds().count();
  if (ms == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(tod.hours().count()),
                  static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(tod.hours().count()),
                  static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()), ms);
  }
  return buf;
}

namespace {

int digits(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) throw std::invalid_argument("truncated timestamp");
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw std::invalid_argument("non-digit in timestamp");
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

void expect(std::string_view s, std::size_t pos, char c) {
  if (pos >= s.size() || s[pos] != c)
    throw std::invalid_argument(std::string("expected '") + c + "' in timestamp");
}

}  // namespace

Timestamp parse_rfc3339(std::string_view s) {
  try {
    const int y = digits(s, 0, 4);
    expect(s, 4, '-');
    const int mo = digits(s, 5, 2);
    expect(s, 7, '-');
    const int d = digits(s, 8, 2);
    if (s.size() <= 10 || (s[10] != 'T' && s[10] != 't' && s[10] != ' '))
      throw std::invalid_argument("expected 'T' in timestamp");
    const int h = digits(s, 11, 2);
    expect(s, 13, ':');
    const int mi = digits(s, 14, 2);
    expect(s, 16, ':');
    const int sec = digits(s, 17, 2);
    std::size_t pos = 19;
    long long ms = 0;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      int scale = 100;
      const std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        ms += (s[pos] - '0') * scale;
        scale /= 10;
        ++pos;
      }
      if (pos == start) throw std::invalid_argument("empty fraction in timestamp");
    }
    minutes offset{0};
    if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
      ++pos;
    } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      const int sign = s[pos] == '-' ? -1 : 1;
      const int oh = digits(s, pos + 1, 2);
      expect(s, pos + 3, ':');
      const int om = digits(s, pos + 4, 2);
      offset = minutes{sign * (oh * 60 + om)};
      pos += 6;
    } else {
      throw std::invalid_argument("missing UTC offset in timestamp");
    }
    if (pos != s.size()) throw std::invalid_argument("trailing characters in timestamp");

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60)
      throw std::invalid_argument("timestamp field out of range");
    return Timestamp{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{sec} +
           milliseconds{ms} - offset;
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(e.what()) + ": \"" + std::string(s) + "\"");
  }
}

}  // namespace proxiclass
