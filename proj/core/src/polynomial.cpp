#include "porehom/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "porehom/error.hpp"
#include "porehom/format.hpp"

namespace porehom {
namespace {

// Dense 3x3 coefficient grid a[i][j] of x1^i x2^j while parsing, so products
// can be formed before the degree check.
using Grid = std::array<std::array<double, 3>, 3>;

int degree(const Grid& g) {
  int d = -1;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (g[i][j] != 0.0) d = std::max(d, i + j);
  return d;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Grid parse() {
    Grid g = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return g;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "polynomial \"" << s_ << "\" at column " << pos_ + 1 << ": " << msg;
    throw Error(ErrorKind::Parse, os.str());
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  static Grid add(const Grid& a, const Grid& b, double sign) {
    Grid r{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] + sign * b[i][j];
    return r;
  }

  Grid mul(const Grid& a, const Grid& b) const {
    Grid r{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (a[i][j] == 0.0) continue;
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            if (b[k][l] == 0.0) continue;
            if (i + k + j + l > 2) fail("degree exceeds 2");
            r[i + k][j + l] += a[i][j] * b[k][l];
          }
      }
    return r;
  }

  Grid expr() {
    Grid g = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      g = add(g, term(), c == '+' ? 1.0 : -1.0);
    }
    return g;
  }

  Grid term() {
    Grid g = factor();
    for (;;) {
      const char c = peek();
      if (c == '*') {
        ++pos_;
        g = mul(g, factor());
      } else if (c == '/') {
        ++pos_;
        const Grid d = factor();
        if (degree(d) > 0 || d[0][0] == 0.0) fail("division only by a nonzero constant");
        for (auto& row : g)
          for (double& x : row) x /= d[0][0];
      } else if (c == '(' || c == 'x' || c == 'y' || std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        g = mul(g, factor());
      } else {
        return g;
      }
    }
  }

  Grid factor() {
    const char c = peek();
    if (c == '-' || c == '+') {
      ++pos_;
      Grid g = factor();
      if (c == '-')
        for (auto& row : g)
          for (double& x : row) x = -x;
      return g;
    }
    Grid base = primary();
    if (peek() == '^') {
      ++pos_;
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_ || (pos_ < s_.size() && s_[pos_] == '.')) fail("expected an integer exponent");
      const int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
      if (e > 2 && degree(base) > 0) fail("degree exceeds 2");
      Grid r{};
      r[0][0] = 1.0;
      for (int k = 0; k < e; ++k) r = mul(r, base);
      return r;
    }
    return base;
  }

  Grid primary() {
    const char c = peek();
    Grid g{};
    if (c == '(') {
      ++pos_;
      g = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return g;
    }
    if (c == 'x' || c == 'y') {
      ++pos_;
      int var = c == 'x' ? 1 : 2;
      if (c == 'x' && pos_ < s_.size() && (s_[pos_] == '1' || s_[pos_] == '2')) var = s_[pos_++] - '0';
      (var == 1 ? g[1][0] : g[0][1]) = 1.0;
      return g;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      const char* first = s_.data() + pos_;
      const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), value);
      if (ec != std::errc{}) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - first);
      g[0][0] = value;
      return g;
    }
    fail(c == '\0' ? "unexpected end of expression" : "unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial2 parse_polynomial(std::string_view text) {
  const Grid g = Parser(text).parse();
  Polynomial2 p;
  p.c = {g[0][0], g[1][0], g[0][1], g[2][0], g[1][1], g[0][2]};
  for (double x : p.c) {
    if (!std::isfinite(x)) throw Error(ErrorKind::Parse, "polynomial \"" + std::string(text) + "\" is not finite");
  }
  return p;
}

std::string to_string(const Polynomial2& p) {
  static constexpr const char* monomial[] = {"", "x1", "x2", "x1^2", "x1*x2", "x2^2"};
  std::string out;
  for (int i = 0; i < 6; ++i) {
    if (p.c[i] == 0.0) continue;
    if (!out.empty()) out += " + ";
    out += format_double(p.c[i]);
    if (i > 0) {
      out += '*';
      out += monomial[i];
    }
  }
  return out.empty() ? "0" : out;
}

double minimum_over(const Polynomial2& p, const Rect& r) {
  const auto& c = p.c;
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double x, double y) {
    if (x >= r.x0 && x <= r.x1 && y >= r.y0 && y <= r.y1) best = std::min(best, p({x, y}));
  };
  for (double x : {r.x0, r.x1})
    for (double y : {r.y0, r.y1}) consider(x, y);
  // Edge extrema: along x = const the polynomial is quadratic in y and so on.
  for (double x : {r.x0, r.x1})
    if (c[5] != 0.0) consider(x, -(c[2] + c[4] * x) / (2.0 * c[5]));
  for (double y : {r.y0, r.y1})
    if (c[3] != 0.0) consider(-(c[1] + c[4] * y) / (2.0 * c[3]), y);
  const double det = 4.0 * c[3] * c[5] - c[4] * c[4];
  if (det != 0.0) {
    consider((-2.0 * c[5] * c[1] + c[4] * c[2]) / det, (-2.0 * c[3] * c[2] + c[4] * c[1]) / det);
  }
  return best;
}

}  // namespace porehom
