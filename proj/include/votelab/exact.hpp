#pragma once

// Exact arithmetic used throughout votelab: checked 64-bit rationals and
// quadratic irrationals of the form a + b*sqrt(d).
//
// Every comparison is exact. Intermediate products run in 128-bit integers
// and any result that no longer fits in 64 bits throws std::overflow_error
// instead of silently wrapping.

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <ostream>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace votelab {

namespace detail {

using i128 = __int128;

inline std::int64_t narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) {
    throw std::overflow_error("votelab: exact arithmetic overflow");
  }
  return static_cast<std::int64_t>(v);
}

inline i128 abs128(i128 v) { return v < 0 ? -v : v; }

inline i128 gcd128(i128 a, i128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline i128 mul_checked(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("votelab: exact arithmetic overflow");
  }
  return r;
}

inline int sign128(i128 v) { return (v > 0) - (v < 0); }

}  // namespace detail

/// A normalized rational number p/q with q > 0 and gcd(p, q) = 1.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num) : num_(num), den_(1) {}  // NOLINT: implicit by intent
  Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Largest integer not above the value.
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    using detail::i128;
    i128 n = detail::mul_checked(a.num_, b.den_) + detail::mul_checked(b.num_, a.den_);
    i128 d = detail::mul_checked(a.den_, b.den_);
    return from_wide(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(detail::mul_checked(a.num_, b.num_), detail::mul_checked(a.den_, b.den_));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("votelab: division by zero");
    return from_wide(detail::mul_checked(a.num_, b.den_), detail::mul_checked(a.den_, b.num_));
  }
  Rational operator-() const {
    Rational r;
    r.num_ = detail::narrow(-static_cast<detail::i128>(num_));
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    detail::i128 l = static_cast<detail::i128>(a.num_) * b.den_;
    detail::i128 r = static_cast<detail::i128>(b.num_) * a.den_;
    return l <=> r;
  }

  /// "p/q", or just "p" for integers.
  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  static Rational from_wide(detail::i128 n, detail::i128 d) {
    if (d == 0) throw std::domain_error("votelab: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    detail::i128 g = detail::gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    Rational r;
    r.num_ = detail::narrow(n);
    r.den_ = detail::narrow(d);
    return r;
  }

 private:
  void assign(std::int64_t n, std::int64_t d) { *this = from_wide(n, d); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

/// Splits n >= 1 into f*f*d with d squarefree; returns {f, d}.
inline std::pair<std::int64_t, std::int64_t> split_square(std::int64_t n) {
  if (n <= 0) throw std::domain_error("votelab: split_square needs a positive integer");
  std::int64_t f = 1;
  std::int64_t d = n;
  for (std::int64_t p = 2; p <= d / p; ++p) {
    while (d % (p * p) == 0) {
      d /= p * p;
      f *= p;
    }
  }
  return {f, d};
}

/// An exact real number a + b*sqrt(d) with rational a, b and squarefree d > 1.
/// Rationals are represented with b = 0 and d = 0. Numbers with different
/// radicands are still totally ordered.
class Exact {
 public:
  Exact() = default;
  Exact(std::int64_t v) : a_(v) {}  // NOLINT
  Exact(Rational v) : a_(v) {}      // NOLINT

  /// a + b*sqrt(radicand); square factors of the radicand are pulled out.
  Exact(Rational a, Rational b, std::int64_t radicand) : a_(a) {
    if (radicand < 0) throw std::domain_error("votelab: negative radicand");
    if (b.sign() == 0 || radicand == 0) return;
    auto [f, d] = split_square(radicand);
    if (d == 1) {
      a_ += b * Rational(f);
    } else {
      b_ = b * Rational(f);
      d_ = d;
    }
  }

  const Rational& rational_part() const { return a_; }
  const Rational& radical_coefficient() const { return b_; }
  std::int64_t radicand() const { return d_; }
  bool is_rational() const { return d_ == 0; }
  std::optional<Rational> as_rational() const {
    if (is_rational()) return a_;
    return std::nullopt;
  }

  double to_double() const {
    return a_.to_double() + b_.to_double() * std::sqrt(static_cast<double>(d_));
  }

  int sign() const { return sign_single(a_, b_, d_); }

  friend Exact operator+(const Exact& x, const Exact& y) {
    const std::int64_t d = common_radicand(x, y);
    Exact r;
    r.a_ = x.a_ + y.a_;
    r.b_ = x.b_ + y.b_;
    r.d_ = r.b_.sign() == 0 ? 0 : d;
    return r;
  }
  Exact operator-() const {
    Exact r = *this;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
  }
  friend Exact operator-(const Exact& x, const Exact& y) { return x + (-y); }
  friend Exact operator*(const Exact& x, const Exact& y) {
    const std::int64_t d = common_radicand(x, y);
    Exact r;
    r.a_ = x.a_ * y.a_ + x.b_ * y.b_ * Rational(d);
    r.b_ = x.a_ * y.b_ + x.b_ * y.a_;
    r.d_ = r.b_.sign() == 0 ? 0 : d;
    return r;
  }
  /// Division by a rational only; dividing by a surd is never needed here.
  friend Exact operator/(const Exact& x, const Rational& y) {
    Exact r = x;
    r.a_ /= y;
    r.b_ /= y;
    return r;
  }

  friend bool operator==(const Exact& x, const Exact& y) { return compare(x, y) == 0; }
  friend std::strong_ordering operator<=>(const Exact& x, const Exact& y) {
    return compare(x, y) <=> 0;
  }

  /// Largest integer not above the value.
  std::int64_t floor() const {
    if (is_rational()) return a_.floor();
    auto f = static_cast<std::int64_t>(std::floor(to_double()));
    while (compare(Exact(f), *this) > 0) --f;
    while (compare(Exact(f + 1), *this) <= 0) ++f;
    return f;
  }

  /// "p/q" for rationals, "(p+r*sqrt(d))/s" otherwise.
  std::string str() const {
    if (is_rational()) return a_.str();
    const std::int64_t s = std::lcm(a_.den(), b_.den());
    const std::int64_t p = a_.num() * (s / a_.den());
    const std::int64_t r = b_.num() * (s / b_.den());
    std::string body;
    if (p != 0) body = std::to_string(p);
    if (r < 0) {
      body += "-";
    } else if (p != 0) {
      body += "+";
    }
    const std::int64_t ar = r < 0 ? -r : r;
    if (ar != 1) body += std::to_string(ar) + "*";
    body += "sqrt(" + std::to_string(d_) + ")";
    if (s == 1) return body;
    return "(" + body + ")/" + std::to_string(s);
  }

  /// Rounds to `places` decimals, ties away from zero, and prints the digits.
  std::string decimal(int places = 3) const {
    std::int64_t scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    const Exact scaled = *this * Exact(Rational(scale));
    const Rational half(1, 2);
    const std::int64_t units =
        scaled.sign() >= 0 ? (scaled + Exact(half)).floor() : -((-scaled) + Exact(half)).floor();
    const std::int64_t mag = units < 0 ? -units : units;
    std::string digits = std::to_string(mag % scale);
    while (static_cast<int>(digits.size()) < places) digits.insert(digits.begin(), '0');
    std::string out = units < 0 ? "-" : "";
    out += std::to_string(mag / scale);
    if (places > 0) out += "." + digits;
    return out;
  }

  static int compare(const Exact& x, const Exact& y) {
    if (x.d_ == y.d_ || x.is_rational() || y.is_rational()) {
      const Exact diff = x - y;
      return diff.sign();
    }
    return sign_mixed(x.a_ - y.a_, x.b_, x.d_, -y.b_, y.d_);
  }

 private:
  static std::int64_t common_radicand(const Exact& x, const Exact& y) {
    if (x.is_rational()) return y.d_;
    if (y.is_rational()) return x.d_;
    if (x.d_ != y.d_) throw std::domain_error("votelab: arithmetic across different radicands");
    return x.d_;
  }

  // sign of A + B*sqrt(d) for integers, d >= 0
  static int sign_int(detail::i128 A, detail::i128 B, std::int64_t d) {
    const int sa = detail::sign128(A);
    const int sb = detail::sign128(B);
    if (d == 0 || sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    const detail::i128 lhs = detail::mul_checked(A, A);
    const detail::i128 rhs = detail::mul_checked(detail::mul_checked(B, B), d);
    if (lhs > rhs) return sa;
    if (lhs < rhs) return sb;
    return 0;
  }

  // sign of a + b*sqrt(d)
  static int sign_single(const Rational& a, const Rational& b, std::int64_t d) {
    // scale by the positive den(a)*den(b)
    return sign_int(detail::mul_checked(a.num(), b.den()), detail::mul_checked(b.num(), a.den()), d);
  }

  // sign of u + v*sqrt(d1) + w*sqrt(d2), d1 != d2 both squarefree
  static int sign_mixed(const Rational& u, const Rational& v, std::int64_t d1, const Rational& w,
                        std::int64_t d2) {
    // scale to integers by the positive common denominator
    const detail::i128 l1 = std::lcm(u.den(), v.den());
    const detail::i128 L = l1 / detail::gcd128(l1, w.den()) * w.den();
    const detail::i128 U = u.num() * (L / u.den());
    const detail::i128 V = v.num() * (L / v.den());
    const detail::i128 W = w.num() * (L / w.den());
    const int s1 = sign_int(U, V, d1);
    const int s2 = detail::sign128(W);
    if (s1 == 0) return s2;
    if (s2 == 0 || s1 == s2) return s1;
    // |U + V sqrt(d1)|^2 - W^2 d2 = (U^2 + V^2 d1 - W^2 d2) + 2UV sqrt(d1)
    using detail::mul_checked;
    const detail::i128 A = mul_checked(U, U) + mul_checked(mul_checked(V, V), d1) - mul_checked(mul_checked(W, W), d2);
    const detail::i128 B = mul_checked(2 * U, V);
    const int t = sign_int(A, B, d1);
    if (t > 0) return s1;
    if (t < 0) return s2;
    return 0;
  }

  Rational a_;
  Rational b_;
  std::int64_t d_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const Exact& x) { return os << x.str(); }

/// Parses "p", "p/q", "(p+r*sqrt(d))/s" and "p+r*sqrt(d)" style literals.
inline Exact parse_exact(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (c != ' ') s.push_back(c);
  }
  static const std::regex rational_re(R"(^([+-]?\d+)(?:/(\d+))?$)");
  static const std::regex surd_re(
      R"(^\(?([+-]?\d+)?(?:([+-])(\d+)?\*?sqrt\((\d+)\)|([+-]?)(\d+)?\*?sqrt\((\d+)\))\)?(?:/(\d+))?$)");
  std::smatch mt;
  auto to_i64 = [](const std::string& v) { return static_cast<std::int64_t>(std::stoll(v)); };
  if (std::regex_match(s, mt, rational_re)) {
    const std::int64_t den = mt[2].matched ? to_i64(mt[2]) : 1;
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return Exact(Rational(to_i64(mt[1]), den));
  }
  if (std::regex_match(s, mt, surd_re)) {
    const std::int64_t p = mt[1].matched ? to_i64(mt[1]) : 0;
    std::int64_t r = 1;
    std::int64_t d = 0;
    if (mt[4].matched) {
      r = mt[3].matched ? to_i64(mt[3]) : 1;
      if (mt[2] == "-") r = -r;
      d = to_i64(mt[4]);
    } else {
      r = mt[6].matched ? to_i64(mt[6]) : 1;
      if (mt[5] == "-") r = -r;
      d = to_i64(mt[7]);
    }
    const std::int64_t den = mt[8].matched ? to_i64(mt[8]) : 1;
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return Exact(Rational(p, den), Rational(r, den), d);
  }
  throw std::invalid_argument("not an exact number: '" + std::string(text) + "'");
}

}  // namespace votelab
