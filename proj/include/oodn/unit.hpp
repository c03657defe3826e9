#ifndef OODN_UNIT_HPP
#define OODN_UNIT_HPP

#include <map>
#include <optional>
#include <string>

namespace oodn {

/// A unit of measure as a product of base symbols with integer exponents.
/// Examples: {} (dimensionless, rendered "1"), {cm:1}, {cm:2} ("cm^2"),
/// {sides:1}, {deg:1}. Zero exponents are never stored.
class Unit {
 public:
  Unit() = default;
  explicit Unit(const std::string& symbol) { factors_[symbol] = 1; }
  Unit(const std::string& symbol, int exponent);

  static Unit dimensionless() { return Unit{}; }

  bool is_dimensionless() const { return factors_.empty(); }

  Unit operator*(const Unit& other) const;
  Unit operator/(const Unit& other) const;
  Unit pow(int exponent) const;

  bool operator==(const Unit& other) const = default;
  auto operator<=>(const Unit& other) const = default;

  /// "1" when dimensionless; otherwise factors sorted by symbol, joined
  /// with "*", exponent omitted when 1: "cm", "cm^2", "cm^2*deg^-1".
  std::string render() const;

  /// Inverse of render. Returns nullopt on malformed input.
  static std::optional<Unit> parse(const std::string& text);

  const std::map<std::string, int>& factors() const { return factors_; }

 private:
  std::map<std::string, int> factors_;
};

}  // namespace oodn

#endif
