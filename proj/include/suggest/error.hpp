#ifndef SUGGEST_ERROR_HPP
#define SUGGEST_ERROR_HPP

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace suggest {

// Every recoverable failure in the library is reported as an Error with a
// human-readable message carrying file/row context where applicable.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
inline void append_all(std::ostringstream&) {}
template <typename T, typename... Rest>
void append_all(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  append_all(os, rest...);
}
}  // namespace detail

template <typename... Args>
std::string concat(const Args&... args) {
  std::ostringstream os;
  detail::append_all(os, args...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void fail(const Args&... args) {
  throw Error(concat(args...));
}

// Numeric field parsers that fail with context instead of leaking
// std::invalid_argument out of stoull/stod.
inline std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(what, ": expected an unsigned integer, got \"", s, "\"");
  }
}

inline double parse_f64(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(what, ": expected a number, got \"", s, "\"");
  }
}

}  // namespace suggest

#endif
