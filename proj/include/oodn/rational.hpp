#ifndef OODN_RATIONAL_HPP
#define OODN_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <sstream>
#include <string>

namespace oodn {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

/// Renders in lowest terms: "4", "-1/2". The inverse of parse_rational.
inline std::string render_rational(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

/// Accepts "p" or "p/q" with an optional leading minus. Returns nullopt on
/// anything else (including q == 0).
std::optional<Rational> parse_rational(const std::string& text);

/// r raised to an integer power; exponent may be negative (requires r != 0).
Rational rational_pow(const Rational& base, const Integer& exp);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace oodn

#endif
