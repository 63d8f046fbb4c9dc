#pragma once

// Fixed-point decimal arithmetic for physical dimensions (micrometers).
// Measurement reports must not drift from decimal inputs like 0.7, so
// values are kept as integer units scaled by a power of ten and only
// converted to double at output boundaries.

#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace voxmet {

class Dec {
 public:
  Dec() = default;

  static Dec from_units(std::int64_t units, int scale) {
    if (scale < 0 || scale > kMaxScale) {
      throw std::invalid_argument("Dec: scale out of range");
    }
    Dec d;
    d.units_ = units;
    d.scale_ = scale;
    d.normalize();
    return d;
  }

  static Dec from_int(std::int64_t v) { return from_units(v, 0); }

  // Exact parse of a plain or exponent-form decimal literal.
  static Dec parse(std::string_view s) {
    const std::string text(s);
    const char* p = text.c_str();
    const char* end = p + text.size();
    if (p == end) throw std::invalid_argument("Dec: empty string");

    bool negative = false;
    if (*p == '+' || *p == '-') {
      negative = (*p == '-');
      ++p;
    }
    std::int64_t units = 0;
    int scale = 0;
    bool any_digit = false;
    for (; p != end && *p >= '0' && *p <= '9'; ++p) {
      units = mul_checked(units, 10);
      units += *p - '0';
      any_digit = true;
    }
    if (p != end && *p == '.') {
      ++p;
      for (; p != end && *p >= '0' && *p <= '9'; ++p) {
        units = mul_checked(units, 10);
        units += *p - '0';
        ++scale;
        any_digit = true;
      }
    }
    int exponent = 0;
    if (p != end && (*p == 'e' || *p == 'E')) {
      ++p;
      bool exp_neg = false;
      if (p != end && (*p == '+' || *p == '-')) {
        exp_neg = (*p == '-');
        ++p;
      }
      if (p == end) throw std::invalid_argument("Dec: bad exponent");
      for (; p != end && *p >= '0' && *p <= '9'; ++p) {
        exponent = exponent * 10 + (*p - '0');
        if (exponent > 100) throw std::invalid_argument("Dec: exponent too large");
      }
      if (exp_neg) exponent = -exponent;
    }
    if (p != end || !any_digit) {
      throw std::invalid_argument("Dec: not a decimal literal: " + text);
    }
    scale -= exponent;
    while (scale < 0) {
      units = mul_checked(units, 10);
      ++scale;
    }
    if (scale > kMaxScale) throw std::invalid_argument("Dec: too many decimal places");
    if (negative) units = -units;
    return from_units(units, scale);
  }

  // Shortest round-trip formatting of the double, then exact parse. Faithful
  // to any literal of <= 15 significant digits that produced the double.
  static Dec from_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) throw std::invalid_argument("Dec: unformattable double");
    return parse(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
  }

  std::int64_t units() const { return units_; }
  int scale() const { return scale_; }
  bool is_zero() const { return units_ == 0; }
  bool is_negative() const { return units_ < 0; }

  Dec operator+(const Dec& o) const {
    auto [a, b, s] = aligned(*this, o);
    return from_units(a + b, s);
  }
  Dec operator-(const Dec& o) const {
    auto [a, b, s] = aligned(*this, o);
    return from_units(a - b, s);
  }
  Dec operator*(const Dec& o) const {
    return from_units(mul_checked(units_, o.units_), scale_ + o.scale_);
  }
  Dec operator*(std::int64_t k) const { return from_units(mul_checked(units_, k), scale_); }
  Dec abs() const { return units_ < 0 ? from_units(-units_, scale_) : *this; }

  // Divide by a positive integer, extending the scale until the division is
  // exact. Throws if the quotient does not terminate within kMaxScale digits;
  // callers that tolerate rounding use div_rounded.
  Dec div_exact(std::int64_t n) const {
    Dec q;
    if (!try_div(n, q)) throw std::domain_error("Dec: non-terminating division");
    return q;
  }

  bool try_div(std::int64_t n, Dec& out) const {
    if (n <= 0) throw std::invalid_argument("Dec: divisor must be positive");
    std::int64_t u = units_;
    int s = scale_;
    while (u % n != 0) {
      if (s >= kMaxScale) return false;
      u = mul_checked(u, 10);
      ++s;
    }
    out = from_units(u / n, s);
    return true;
  }

  // Exact when the quotient terminates, otherwise rounded half-up at
  // `digits` decimal places.
  Dec div_rounded(std::int64_t n, int digits = 12) const {
    Dec q;
    if (try_div(n, q)) return q;
    std::int64_t u = units_;
    int s = scale_;
    while (s < digits + 1) {
      u = mul_checked(u, 10);
      ++s;
    }
    std::int64_t v = u / n;  // one guard digit
    std::int64_t rounded = (v < 0 ? v - 5 : v + 5) / 10;
    return from_units(rounded, digits);
  }

  bool operator==(const Dec& o) const {
    auto [a, b, s] = aligned(*this, o);
    (void)s;
    return a == b;
  }
  std::strong_ordering operator<=>(const Dec& o) const {
    auto [a, b, s] = aligned(*this, o);
    (void)s;
    return a <=> b;
  }

  double to_double() const {
    double v = static_cast<double>(units_);
    for (int i = 0; i < scale_; ++i) v /= 10.0;
    return v;
  }

  std::string str() const {
    std::int64_t u = units_;
    std::string sign;
    if (u < 0) {
      sign = "-";
      u = -u;
    }
    std::string digits = std::to_string(u);
    if (scale_ == 0) return sign + digits;
    if (static_cast<int>(digits.size()) <= scale_) {
      digits.insert(0, static_cast<std::size_t>(scale_) - digits.size() + 1, '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(scale_), 1, '.');
    return sign + digits;
  }

 private:
  static constexpr int kMaxScale = 18;

  std::int64_t units_ = 0;
  int scale_ = 0;

  void normalize() {
    while (scale_ > 0 && units_ % 10 == 0) {
      units_ /= 10;
      --scale_;
    }
    if (units_ == 0) scale_ = 0;
  }

  static std::int64_t mul_checked(std::int64_t a, std::int64_t b) {
    __int128 r = static_cast<__int128>(a) * b;
    if (r > INT64_MAX || r < INT64_MIN) throw std::overflow_error("Dec: overflow");
    return static_cast<std::int64_t>(r);
  }

  struct Aligned {
    std::int64_t a, b;
    int scale;
  };
  static Aligned aligned(const Dec& x, const Dec& y) {
    std::int64_t a = x.units_, b = y.units_;
    int s = x.scale_;
    for (; s < y.scale_; ++s) a = mul_checked(a, 10);
    for (int t = y.scale_; t < x.scale_; ++t) b = mul_checked(b, 10);
    if (x.scale_ > s) s = x.scale_;
    return {a, b, s};
  }
};

}  // namespace voxmet
