#include "oodn/rational.hpp"

#include <cctype>

namespace oodn {

std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  if (text[0] == '-') i = 1;
  if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
    return std::nullopt;
  std::size_t slash = std::string::npos;
  for (std::size_t j = i; j < text.size(); ++j) {
    if (text[j] == '/') {
      if (slash != std::string::npos) return std::nullopt;
      slash = j;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(text[j]))) return std::nullopt;
  }
  if (slash != std::string::npos &&
      (slash == i || slash + 1 == text.size()))
    return std::nullopt;
  try {
    Rational r(text);
    return r;
  } catch (const std::exception&) {
    return std::nullopt;  // e.g. zero denominator
  }
}

Rational rational_pow(const Rational& base, const Integer& exp) {
  if (exp == 0) return Rational(1);
  Integer e = exp < 0 ? Integer(-exp) : exp;
  Integer num = boost::multiprecision::pow(numerator(base), e.convert_to<unsigned>());
  Integer den = boost::multiprecision::pow(denominator(base), e.convert_to<unsigned>());
  Rational r(num, den);
  if (exp < 0) {
    if (r == 0) throw std::domain_error("zero base with negative exponent");
    r = Rational(1) / r;
  }
  return r;
}

}  // namespace oodn
