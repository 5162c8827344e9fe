#include "cubix/units.hpp"

#include <charconv>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

#include "cubix/errors.hpp"

namespace cubix::units {

Dimension Dimension::operator*(const Dimension& o) const {
  Dimension d;
  for (std::size_t k = 0; k < 5; ++k) d.exponents[k] = exponents[k] + o.exponents[k];
  return d;
}

Dimension Dimension::operator/(const Dimension& o) const {
  Dimension d;
  for (std::size_t k = 0; k < 5; ++k) d.exponents[k] = exponents[k] - o.exponents[k];
  return d;
}

Dimension Dimension::pow(int k) const {
  Dimension d;
  for (std::size_t i = 0; i < 5; ++i) d.exponents[i] = exponents[i] * k;
  return d;
}

std::string Dimension::to_string() const {
  static constexpr const char* kBase[5] = {"m", "kg", "s", "A", "rad"};
  std::string out;
  for (std::size_t k = 0; k < 5; ++k) {
    if (exponents[k] == 0) continue;
    if (!out.empty()) out += '*';
    out += kBase[k];
    if (exponents[k] != 1) out += '^' + std::to_string(exponents[k]);
  }
  return out.empty() ? "1" : out;
}

namespace {

constexpr Dimension kM{{1, 0, 0, 0, 0}};
constexpr Dimension kKg{{0, 1, 0, 0, 0}};
constexpr Dimension kS{{0, 0, 1, 0, 0}};
constexpr Dimension kA{{0, 0, 0, 1, 0}};
constexpr Dimension kRad{{0, 0, 0, 0, 1}};
constexpr Dimension kN{{1, 1, -2, 0, 0}};
constexpr Dimension kNm{{2, 1, -2, 0, 0}};

const std::unordered_map<std::string, Unit>& table() {
  static const std::unordered_map<std::string, Unit> units{
      {"m", {1.0, kM}},          {"cm", {1e-2, kM}},       {"mm", {1e-3, kM}},
      {"kg", {1.0, kKg}},        {"g", {1e-3, kKg}},       {"s", {1.0, kS}},
      {"ms", {1e-3, kS}},        {"min", {60.0, kS}},      {"A", {1.0, kA}},
      {"mA", {1e-3, kA}},        {"rad", {1.0, kRad}},     {"mrad", {1e-3, kRad}},
      {"deg", {std::numbers::pi / 180.0, kRad}},
      {"N", {1.0, kN}},          {"kN", {1e3, kN}},        {"mN", {1e-3, kN}},
      {"Nm", {1.0, kNm}},        {"mNm", {1e-3, kNm}},     {"Hz", {1.0, kS.pow(-1)}},
  };
  return units;
}

class UnitParser {
 public:
  explicit UnitParser(std::string_view text) : text_(text) {}

  Unit parse() {
    Unit u = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return u;
  }

 private:
  Unit expression() {
    Unit u = term();
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) return u;
      const char op = text_[pos_];
      if (op != '*' && op != '/') return u;
      ++pos_;
      const Unit rhs = term();
      if (op == '*') {
        u.scale *= rhs.scale;
        u.dimension = u.dimension * rhs.dimension;
      } else {
        u.scale /= rhs.scale;
        u.dimension = u.dimension / rhs.dimension;
      }
    }
  }

  Unit term() {
    skip_space();
    Unit u;
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      u = expression();
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("missing ')'");
      ++pos_;
    } else if (pos_ < text_.size() && text_[pos_] == '1') {
      ++pos_;
    } else {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a unit symbol");
      const std::string symbol(text_.substr(start, pos_ - start));
      const auto it = table().find(symbol);
      if (it == table().end()) fail("unknown unit '" + symbol + "'");
      u = it->second;
    }
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      ++pos_;
      skip_space();
      int k = 0;
      const auto* first = text_.data() + pos_;
      const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), k);
      if (ec != std::errc()) fail("expected an integer exponent");
      pos_ += static_cast<std::size_t>(ptr - first);
      u.scale = std::pow(u.scale, k);
      u.dimension = u.dimension.pow(k);
    }
    return u;
  }

  void skip_space() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("unit '" + std::string(text_) + "': " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool parse_number(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

Unit parse_unit(std::string_view expression) { return UnitParser(expression).parse(); }

Quantity parse_quantity(std::string_view text) {
  Quantity q;
  std::size_t pos = 0;
  const auto is_sep = [](char c) { return c == ' ' || c == ',' || c == '\t'; };
  while (pos < text.size()) {
    while (pos < text.size() && is_sep(text[pos])) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !is_sep(text[end])) ++end;
    double v = 0.0;
    if (parse_number(text.substr(pos, end - pos), v)) {
      q.values.push_back(v);
      pos = end;
      continue;
    }
    if (q.values.empty()) {
      throw ParseError("'" + std::string(text) + "' has no numeric value");
    }
    const Unit u = parse_unit(text.substr(pos));
    for (double& x : q.values) x *= u.scale;
    q.dimension = u.dimension;
    q.has_unit = true;
    return q;
  }
  if (q.values.empty()) throw ParseError("empty quantity");
  return q;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

}  // namespace cubix::units
