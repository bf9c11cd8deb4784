#include "rytov/scaled.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "rytov/errors.hpp"

namespace rytov {

ScaledValue::ScaledValue(double value) : mantissa_(value) {
  if (!std::isfinite(value)) throw DomainError("ScaledValue: non-finite input");
  normalize();
}

ScaledValue ScaledValue::from_parts(double mantissa, std::int64_t exponent) {
  ScaledValue v;
  if (!std::isfinite(mantissa)) throw DomainError("ScaledValue: non-finite mantissa");
  v.mantissa_ = mantissa;
  v.exponent_ = exponent;
  v.normalize();
  return v;
}

void ScaledValue::normalize() {
  if (mantissa_ == 0.0) {
    exponent_ = 0;
    return;
  }
  int e = 0;
  // frexp yields [0.5, 1); shift into [1, 2).
  const double m = std::frexp(mantissa_, &e);
  mantissa_ = 2.0 * m;
  exponent_ += static_cast<std::int64_t>(e) - 1;
}

double ScaledValue::to_double() const {
  if (is_zero()) return 0.0;
  if (exponent_ > std::numeric_limits<double>::max_exponent) {
    return sign() * std::numeric_limits<double>::infinity();
  }
  if (exponent_ < std::numeric_limits<double>::min_exponent - 60) return 0.0 * sign();
  return std::ldexp(mantissa_, static_cast<int>(exponent_));
}

double ScaledValue::log_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(mantissa_)) + static_cast<double>(exponent_) * std::numbers::ln2;
}

ScaledValue ScaledValue::abs() const {
  ScaledValue v = *this;
  v.mantissa_ = std::abs(v.mantissa_);
  return v;
}

ScaledValue ScaledValue::operator-() const {
  ScaledValue v = *this;
  v.mantissa_ = -v.mantissa_;
  return v;
}

ScaledValue& ScaledValue::operator*=(const ScaledValue& rhs) {
  if (is_zero() || rhs.is_zero()) {
    *this = ScaledValue{};
    return *this;
  }
  mantissa_ *= rhs.mantissa_;
  exponent_ += rhs.exponent_;
  normalize();
  return *this;
}

ScaledValue& ScaledValue::operator/=(const ScaledValue& rhs) {
  if (rhs.is_zero()) throw DomainError("ScaledValue: division by zero");
  if (is_zero()) return *this;
  mantissa_ /= rhs.mantissa_;
  exponent_ -= rhs.exponent_;
  normalize();
  return *this;
}

ScaledValue& ScaledValue::operator+=(const ScaledValue& rhs) {
  if (rhs.is_zero()) return *this;
  if (is_zero()) {
    *this = rhs;
    return *this;
  }
  // Beyond 64 bits of separation the smaller operand cannot change the result.
  constexpr std::int64_t kMaxShift = 64;
  const std::int64_t shift = exponent_ - rhs.exponent_;
  if (shift > kMaxShift) return *this;
  if (shift < -kMaxShift) {
    *this = rhs;
    return *this;
  }
  if (shift >= 0) {
    mantissa_ += std::ldexp(rhs.mantissa_, static_cast<int>(-shift));
  } else {
    mantissa_ = std::ldexp(mantissa_, static_cast<int>(shift)) + rhs.mantissa_;
    exponent_ = rhs.exponent_;
  }
  normalize();
  return *this;
}

ScaledValue& ScaledValue::operator-=(const ScaledValue& rhs) { return *this += -rhs; }

bool operator<(const ScaledValue& a, const ScaledValue& b) {
  const int sa = a.sign();
  const int sb = b.sign();
  if (sa != sb) return sa < sb;
  if (sa == 0) return false;
  if (a.exponent_ != b.exponent_) {
    return sa > 0 ? a.exponent_ < b.exponent_ : a.exponent_ > b.exponent_;
  }
  return a.mantissa_ < b.mantissa_;
}

std::ostream& operator<<(std::ostream& os, const ScaledValue& v) {
  return os << v.mantissa() << "*2^" << v.exponent();
}

}  // namespace rytov
