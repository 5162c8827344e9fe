#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace cubix::units {

/// Exponents of meter, kilogram, second, ampere and radian.
struct Dimension {
  std::array<int, 5> exponents{};

  friend bool operator==(const Dimension&, const Dimension&) = default;
  Dimension operator*(const Dimension& o) const;
  Dimension operator/(const Dimension& o) const;
  Dimension pow(int k) const;
  std::string to_string() const;
};

/// A unit expression such as "N*s/m", "kg*m^2" or "mNm/A".
struct Unit {
  double scale = 1.0;  ///< SI value of one unit
  Dimension dimension;
};

/// Throws ParseError on an unknown symbol or malformed expression.
Unit parse_unit(std::string_view expression);

/// Values and unit of text like "0.2 -0.1 0.45 m" or "14 mNm/A".
struct Quantity {
  std::vector<double> values;  ///< already converted to SI
  Dimension dimension;
  bool has_unit = false;
};

/// Throws ParseError on malformed numbers or units.
Quantity parse_quantity(std::string_view text);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_number(double v);

}  // namespace cubix::units
