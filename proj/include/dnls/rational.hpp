#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>

namespace dnls {

// Reduced fraction on int64 storage. Arithmetic reports failure on overflow
// so callers can drop to floating point instead of silently wrapping.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;  // > 0

  static Rational of(std::int64_t n, std::int64_t d = 1) {
    Rational r{n, d};
    r.normalize();
    return r;
  }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_zero() const { return num == 0; }
  int sign() const { return (num > 0) - (num < 0); }

  friend bool operator==(const Rational&, const Rational&) = default;
};

namespace detail {

inline std::optional<std::int64_t> narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) return std::nullopt;
  return static_cast<std::int64_t>(v);
}

inline std::optional<Rational> make_rat(__int128 num, __int128 den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  const auto n = narrow(num);
  const auto d = narrow(den);
  if (!n || !d) return std::nullopt;
  return Rational{*n, *d};
}

}  // namespace detail

inline std::optional<Rational> rat_add(const Rational& a, const Rational& b) {
  return detail::make_rat(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                          static_cast<__int128>(a.den) * b.den);
}

inline std::optional<Rational> rat_mul(const Rational& a, const Rational& b) {
  return detail::make_rat(static_cast<__int128>(a.num) * b.num,
                          static_cast<__int128>(a.den) * b.den);
}

inline Rational rat_neg(const Rational& a) { return Rational{-a.num, a.den}; }

inline std::optional<Rational> rat_sub(const Rational& a, const Rational& b) {
  return rat_add(a, rat_neg(b));
}

inline std::optional<Rational> rat_div(const Rational& a, const Rational& b) {
  if (b.num == 0) return std::nullopt;
  return detail::make_rat(static_cast<__int128>(a.num) * b.den,
                          static_cast<__int128>(a.den) * b.num);
}

// Exact recovery of a double that is a small fraction p/q, q bounded.
// Returns nullopt when x is not exactly representable that way.
inline std::optional<Rational> rational_from_double(double x, std::int64_t max_den = 1'000'000) {
  if (!std::isfinite(x)) return std::nullopt;
  if (x == 0.0) return Rational{0, 1};
  // continued fraction expansion
  double v = x;
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(v);
    if (std::abs(fl) > 9e15) return std::nullopt;
    const auto a = static_cast<std::int64_t>(fl);
    const __int128 p2 = static_cast<__int128>(a) * p1 + p0;
    const __int128 q2 = static_cast<__int128>(a) * q1 + q0;
    if (q2 > max_den || p2 > INT64_MAX || p2 < INT64_MIN) return std::nullopt;
    p0 = p1;
    q0 = q1;
    p1 = static_cast<std::int64_t>(p2);
    q1 = static_cast<std::int64_t>(q2);
    if (q1 > 0 && static_cast<double>(p1) / static_cast<double>(q1) == x) {
      Rational r{p1, q1};
      r.normalize();
      return r;
    }
    const double frac = v - fl;
    if (frac == 0.0) break;
    v = 1.0 / frac;
  }
  return std::nullopt;
}

// Complex coefficient that keeps exact rational real/imaginary parts as long
// as every input was rational and no intermediate overflowed.
class Coefficient {
 public:
  Coefficient() : exact_(true) {}
  Coefficient(std::complex<double> v) : value_(v), exact_(false) {}  // NOLINT: implicit by design
  Coefficient(const Rational& re, const Rational& im)
      : value_(re.value(), im.value()), re_(re), im_(im), exact_(true) {}

  static Coefficient detect(std::complex<double> v) {
    const auto re = rational_from_double(v.real());
    const auto im = rational_from_double(v.imag());
    if (re && im) return Coefficient(*re, *im);
    return Coefficient(v);
  }

  std::complex<double> value() const { return value_; }
  bool exact() const { return exact_; }
  const Rational& re_rat() const { return re_; }
  const Rational& im_rat() const { return im_; }

  bool is_zero() const {
    if (exact_) return re_.is_zero() && im_.is_zero();
    return value_ == std::complex<double>(0.0, 0.0);
  }

  Coefficient operator+(const Coefficient& o) const {
    if (exact_ && o.exact_) {
      const auto re = rat_add(re_, o.re_);
      const auto im = rat_add(im_, o.im_);
      if (re && im) return Coefficient(*re, *im);
    }
    return Coefficient(value_ + o.value_);
  }

  Coefficient operator*(const Coefficient& o) const {
    if (exact_ && o.exact_) {
      const auto ac = rat_mul(re_, o.re_);
      const auto bd = rat_mul(im_, o.im_);
      const auto ad = rat_mul(re_, o.im_);
      const auto bc = rat_mul(im_, o.re_);
      if (ac && bd && ad && bc) {
        const auto re = rat_sub(*ac, *bd);
        const auto im = rat_add(*ad, *bc);
        if (re && im) return Coefficient(*re, *im);
      }
    }
    return Coefficient(value_ * o.value_);
  }

  // multiply by i  (a+bi -> -b+ai); exactness preserved
  Coefficient times_i() const {
    if (exact_) return Coefficient(rat_neg(im_), re_);
    return Coefficient(value_ * std::complex<double>(0.0, 1.0));
  }

  Coefficient times_minus_i() const { return times_i().negated(); }

  Coefficient negated() const {
    if (exact_) return Coefficient(rat_neg(re_), rat_neg(im_));
    return Coefficient(-value_);
  }

  Coefficient conj() const {
    if (exact_) return Coefficient(re_, rat_neg(im_));
    return Coefficient(std::conj(value_));
  }

  Coefficient times(const Rational& s) const {
    if (exact_) {
      const auto re = rat_mul(re_, s);
      const auto im = rat_mul(im_, s);
      if (re && im) return Coefficient(*re, *im);
    }
    return Coefficient(value_ * s.value());
  }

 private:
  std::complex<double> value_{0.0, 0.0};
  Rational re_{}, im_{};
  bool exact_;
};

}  // namespace dnls
