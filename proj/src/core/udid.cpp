#include "proxiclass/core/udid.hpp"

#include <random>
#include <stdexcept>

namespace proxiclass {

bool Udid::is_well_formed(std::string_view text) noexcept {
  if (text.size() != 32) return false;
  for (char c : text) {
    const bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!hex) return false;
  }
  return true;
}

Udid Udid::parse(std::string_view text) {
  if (!is_well_formed(text))
    throw std::invalid_argument("udid must be 32 lowercase hex characters: \"" +
                                std::string(text) + "\"");
  return Udid{std::string(text)};
}

Udid generate_udid(std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(32, '0');
  for (int word = 0; word < 2; ++word) {
    std::uint64_t bits = rng();
    for (int i = 15; i >= 0; --i) {
      out[word * 16 + i] = kHex[bits & 0xf];
      bits >>= 4;
    }
  }
  return Udid::parse(out);
}

}  // namespace proxiclass
