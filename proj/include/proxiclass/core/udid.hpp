#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace proxiclass {

// 128-bit device identifier, hex-encoded as 32 lowercase characters.
class Udid {
 public:
  // All-zero identifier.
  Udid() : value_(32, '0') {}

  // Throws std::invalid_argument unless `text` matches ^[0-9a-f]{32}$.
  static Udid parse(std::string_view text);
  static bool is_well_formed(std::string_view text) noexcept;

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const Udid&, const Udid&) = default;
  friend bool operator==(const Udid&, const Udid&) = default;

 private:
  explicit Udid(std::string v) : value_(std::move(v)) {}
  std::string value_;
};

// Deterministic per seed.
Udid generate_udid(std::uint64_t rng_seed);

}  // namespace proxiclass

template <>
struct std::hash<proxiclass::Udid> {
  std::size_t operator()(const proxiclass::Udid& u) const noexcept {
    return std::hash<std::string>{}(u.str());
  }
};
