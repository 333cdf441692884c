#ifndef SUGGEST_FINGERPRINT_HPP
#define SUGGEST_FINGERPRINT_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace suggest {

// FNV-1a, 64-bit. Used for vocabulary/normalizer/embedding fingerprints that
// bind a trained model to the exact preprocessing that produced its features.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t seed = 14695981039346656037ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string fingerprint_hex(std::uint64_t fp) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[fp & 0xF];
    fp >>= 4;
  }
  return out;
}

inline std::uint64_t fingerprint_from_hex(const std::string& hex) {
  std::uint64_t fp = 0;
  for (char c : hex) {
    fp <<= 4;
    if (c >= '0' && c <= '9') fp |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') fp |= static_cast<std::uint64_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') fp |= static_cast<std::uint64_t>(c - 'A' + 10);
  }
  return fp;
}

}  // namespace suggest

#endif
