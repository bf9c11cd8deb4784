#pragma once

#include <cstdint>
#include <iosfwd>

namespace rytov {

/// A real number stored as sign * mantissa * 2^exponent with |mantissa| in [1, 2),
/// or exactly zero (mantissa 0, exponent 0).
///
/// Used for Bessel values that leave the double range (I_n(x) ~ 1e-300 and
/// K_n(x) ~ 1e+300 at high order) while their products stay O(1).
class ScaledValue {
 public:
  constexpr ScaledValue() = default;
  explicit ScaledValue(double value);

  /// Builds mantissa * 2^exponent, normalizing the mantissa.
  static ScaledValue from_parts(double mantissa, std::int64_t exponent);

  double mantissa() const { return mantissa_; }
  std::int64_t exponent() const { return exponent_; }

  bool is_zero() const { return mantissa_ == 0.0; }
  int sign() const { return mantissa_ > 0.0 ? 1 : (mantissa_ < 0.0 ? -1 : 0); }

  /// Plain double; overflows to +-inf or underflows to 0 outside the double range.
  double to_double() const;

  /// Natural logarithm of the magnitude. -inf for zero.
  double log_abs() const;

  ScaledValue abs() const;

  ScaledValue operator-() const;
  ScaledValue& operator*=(const ScaledValue& rhs);
  ScaledValue& operator/=(const ScaledValue& rhs);
  ScaledValue& operator+=(const ScaledValue& rhs);
  ScaledValue& operator-=(const ScaledValue& rhs);
  ScaledValue& operator*=(double rhs) { return *this *= ScaledValue(rhs); }
  ScaledValue& operator/=(double rhs) { return *this /= ScaledValue(rhs); }

  friend ScaledValue operator*(ScaledValue a, const ScaledValue& b) { return a *= b; }
  friend ScaledValue operator/(ScaledValue a, const ScaledValue& b) { return a /= b; }
  friend ScaledValue operator+(ScaledValue a, const ScaledValue& b) { return a += b; }
  friend ScaledValue operator-(ScaledValue a, const ScaledValue& b) { return a -= b; }
  friend ScaledValue operator*(ScaledValue a, double b) { return a *= b; }
  friend ScaledValue operator*(double a, ScaledValue b) { return b *= a; }
  friend ScaledValue operator/(ScaledValue a, double b) { return a /= b; }

  friend bool operator==(const ScaledValue& a, const ScaledValue& b) {
    return a.mantissa_ == b.mantissa_ && a.exponent_ == b.exponent_;
  }
  friend bool operator<(const ScaledValue& a, const ScaledValue& b);
  friend bool operator>(const ScaledValue& a, const ScaledValue& b) { return b < a; }

 private:
  void normalize();

  double mantissa_ = 0.0;
  std::int64_t exponent_ = 0;
};

std::ostream& operator<<(std::ostream& os, const ScaledValue& v);

}  // namespace rytov
