#pragma once

#include <array>
#include <string>
#include <string_view>

#include "porehom/geometry.hpp"

namespace porehom {

// Polynomial of total degree <= 2 in (x1, x2):
// c[0] + c[1] x1 + c[2] x2 + c[3] x1^2 + c[4] x1 x2 + c[5] x2^2.
struct Polynomial2 {
  std::array<double, 6> c{};

  double operator()(Vec2 p) const {
    return c[0] + c[1] * p.x + c[2] * p.y + c[3] * p.x * p.x + c[4] * p.x * p.y + c[5] * p.y * p.y;
  }
  bool operator==(const Polynomial2&) const = default;

  static Polynomial2 constant(double value) { return Polynomial2{{value, 0, 0, 0, 0, 0}}; }
};

// Accepts numbers, the variables x1/x2 (aliases x/y), + - * ^ with small
// integer exponents, parentheses and implicit multiplication as in "5(x+y)".
// Throws Error(Parse) on bad syntax or degree above two.
Polynomial2 parse_polynomial(std::string_view text);

// Canonical text that parse_polynomial maps back to the same coefficients.
std::string to_string(const Polynomial2& p);

// Smallest value over the rectangle; exact for degree <= 2 (corners, edge
// extrema and the interior critical point are all checked).
double minimum_over(const Polynomial2& p, const Rect& r);

}  // namespace porehom
