#include "oodn/unit.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace oodn {

Unit::Unit(const std::string& symbol, int exponent) {
  if (exponent != 0) factors_[symbol] = exponent;
}

Unit Unit::operator*(const Unit& other) const {
  Unit out = *this;
  for (const auto& [sym, exp] : other.factors_) {
    int next = out.factors_[sym] + exp;
    if (next == 0)
      out.factors_.erase(sym);
    else
      out.factors_[sym] = next;
  }
  return out;
}

Unit Unit::operator/(const Unit& other) const {
  return *this * other.pow(-1);
}

Unit Unit::pow(int exponent) const {
  Unit out;
  if (exponent == 0) return out;
  for (const auto& [sym, exp] : factors_) out.factors_[sym] = exp * exponent;
  return out;
}

std::string Unit::render() const {
  if (factors_.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& [sym, exp] : factors_) {
    if (!first) os << '*';
    first = false;
    os << sym;
    if (exp != 1) os << '^' << exp;
  }
  return os.str();
}

namespace {

bool valid_symbol(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

std::optional<Unit> Unit::parse(const std::string& text) {
  if (text == "1") return Unit{};
  if (text.empty()) return std::nullopt;
  Unit out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t star = text.find('*', pos);
    std::string factor = text.substr(pos, star == std::string::npos ? star : star - pos);
    std::size_t caret = factor.find('^');
    std::string sym = factor.substr(0, caret);
    int exp = 1;
    if (caret != std::string::npos) {
      std::string etext = factor.substr(caret + 1);
      if (etext.empty()) return std::nullopt;
      char* end = nullptr;
      long v = std::strtol(etext.c_str(), &end, 10);
      if (end == nullptr || *end != '\0' || v == 0) return std::nullopt;
      exp = static_cast<int>(v);
    }
    if (!valid_symbol(sym)) return std::nullopt;
    if (out.factors_.count(sym)) return std::nullopt;
    out.factors_[sym] = exp;
    if (star == std::string::npos) break;
    pos = star + 1;
  }
  return out;
}

}  // namespace oodn
