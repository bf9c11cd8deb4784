#include "rytov/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rytov/errors.hpp"

namespace rytov {
namespace {

constexpr double kEps = 1e-17;
constexpr int kMaxIterations = 10000;
// Rescaling threshold for the recurrences: 2^600.
constexpr int kRescaleBits = 600;
const double kRescaleLimit = std::ldexp(1.0, kRescaleBits);

void check_order(int n, int limit, const char* who) {
  if (n < 0 || n > limit) {
    throw DomainError(std::string(who) + ": order " + std::to_string(n) + " outside [0, " +
                      std::to_string(limit) + "]");
  }
}

void check_argument(double x, bool allow_zero, const char* who) {
  if (!std::isfinite(x) || x > kMaxBesselArgument || x < 0.0 || (!allow_zero && x == 0.0)) {
    throw DomainError(std::string(who) + ": argument " + std::to_string(x) + " outside " +
                      (allow_zero ? "[0, 50]" : "(0, 50]"));
  }
}

// (x/2)^n / n! * sum_m (x^2/4)^m n! / (m! (m+n)!); all terms positive.
ScaledValue i_series(int n, double x) {
  if (x == 0.0) return ScaledValue(n == 0 ? 1.0 : 0.0);
  const double half = 0.5 * x;
  ScaledValue lead(1.0);
  for (int m = 1; m <= n; ++m) lead *= half / m;
  const double q = half * half;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < kMaxIterations; ++m) {
    term *= q / (static_cast<double>(m) * (m + n));
    sum += term;
    if (term < kEps * sum) break;
  }
  return lead * sum;
}

struct K01 {
  double k0;
  double k1;
};

// Logarithmic series, x <= 2.
K01 k01_series(double x) {
  const double q = 0.25 * x * x;
  const double log_half = std::log(0.5 * x);
  const double i0 = i_series(0, x).to_double();
  const double i1 = i_series(1, x).to_double();

  // K_0 = -(ln(x/2) + gamma) I_0 + sum_{m>=1} q^m/(m!)^2 H_m
  double term = 1.0;
  double harmonic = 0.0;
  double sum0 = 0.0;
  // K_1 = 1/x + ln(x/2) I_1 - (x/4) sum_{m>=0} (psi(m+1) + psi(m+2)) q^m / (m! (m+1)!)
  double term1 = 1.0;
  double sum1 = 0.0;
  for (int m = 0; m < kMaxIterations; ++m) {
    if (m > 0) {
      term *= q / (static_cast<double>(m) * m);
      term1 *= q / (static_cast<double>(m) * (m + 1));
      harmonic += 1.0 / m;
      sum0 += term * harmonic;
    }
    const double psi_sum = 2.0 * (harmonic - std::numbers::egamma) + 1.0 / (m + 1);
    const double add1 = term1 * psi_sum;
    sum1 += add1;
    if (m > 0 && term * harmonic < kEps * std::abs(sum0) && std::abs(add1) < kEps * std::abs(sum1)) {
      break;
    }
  }
  return {-(log_half + std::numbers::egamma) * i0 + sum0, 1.0 / x + log_half * i1 - 0.25 * x * sum1};
}

// Steed's continued fraction (Temme's CF2) for integer order, x > 2.
// Returns K_0 and K_1 without the exp(-x) factor.
K01 k01_continued_fraction(double x) {
  constexpr double a1 = 0.25;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 1;
  for (; i < kMaxIterations; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i == kMaxIterations) throw NumericalError("bessel_k: continued fraction did not converge");
  h *= a1;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

// Upward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m, rescaled to stay in range.
std::vector<ScaledValue> k_upward(int nmax, double x) {
  const K01 base = x <= 2.0 ? k01_series(x) : k01_continued_fraction(x);
  const ScaledValue scale = x <= 2.0 ? ScaledValue(1.0) : ScaledValue(std::exp(-x));
  std::vector<ScaledValue> out;
  out.reserve(static_cast<std::size_t>(nmax) + 1);
  out.push_back(scale * base.k0);
  if (nmax == 0) return out;
  out.push_back(scale * base.k1);
  double prev = base.k0;
  double cur = base.k1;
  std::int64_t shift = 0;
  for (int m = 1; m < nmax; ++m) {
    const double next = prev + (2.0 * m / x) * cur;
    prev = cur;
    cur = next;
    if (cur > kRescaleLimit) {
      prev = std::ldexp(prev, -kRescaleBits);
      cur = std::ldexp(cur, -kRescaleBits);
      shift += kRescaleBits;
    }
    out.push_back(scale * ScaledValue::from_parts(cur, shift));
  }
  return out;
}

}  // namespace

ScaledValue bessel_i(int n, double x) {
  check_order(n, kMaxBesselOrder, "bessel_i");
  check_argument(x, true, "bessel_i");
  return i_series(n, x);
}

ScaledValue bessel_k(int n, double x) {
  check_order(n, kMaxBesselOrder, "bessel_k");
  check_argument(x, false, "bessel_k");
  return k_upward(n, x).back();
}

std::vector<ScaledValue> bessel_i_sequence(int nmax, double x) {
  check_order(nmax, kMaxBesselOrder + 1, "bessel_i_sequence");
  check_argument(x, true, "bessel_i_sequence");
  std::vector<ScaledValue> out(static_cast<std::size_t>(nmax) + 1);
  if (x == 0.0) {
    out[0] = ScaledValue(1.0);
    return out;
  }
  const int reach = std::max(nmax, static_cast<int>(std::ceil(x)));
  const int start = reach + static_cast<int>(std::sqrt(80.0 * reach)) + 30;

  // Unnormalized solution of the recurrence, carried with a running power-of-two shift.
  double above = 0.0;
  double cur = 1.0;
  std::int64_t shift = 0;
  for (int m = start; m > 0; --m) {
    const double below = above + (2.0 * m / x) * cur;
    above = cur;
    cur = below;
    if (std::abs(cur) > kRescaleLimit) {
      above = std::ldexp(above, -kRescaleBits);
      cur = std::ldexp(cur, -kRescaleBits);
      shift += kRescaleBits;
    }
    // `above` now holds the (m)-th value, `cur` the (m-1)-th.
    if (m <= nmax) out[static_cast<std::size_t>(m)] = ScaledValue::from_parts(above, shift);
  }
  out[0] = ScaledValue::from_parts(cur, shift);
  const ScaledValue norm = i_series(0, x) / out[0];
  for (auto& v : out) v *= norm;
  return out;
}

std::vector<ScaledValue> bessel_k_sequence(int nmax, double x) {
  check_order(nmax, kMaxBesselOrder + 1, "bessel_k_sequence");
  check_argument(x, false, "bessel_k_sequence");
  return k_upward(nmax, x);
}

BesselDerivatives bessel_pair_derivatives(int n, double x) {
  check_order(n, kMaxBesselOrder, "bessel_pair_derivatives");
  check_argument(x, false, "bessel_pair_derivatives");
  const auto ks = k_upward(n + 1, x);
  const int lower = n == 0 ? 1 : n - 1;
  const ScaledValue i_lower = i_series(lower, x);
  const ScaledValue i_upper = i_series(n + 1, x);
  const ScaledValue k_lower = ks[static_cast<std::size_t>(lower)];
  const ScaledValue k_upper = ks[static_cast<std::size_t>(n + 1)];
  return {(i_lower + i_upper) * 0.5, -((k_lower + k_upper) * 0.5)};
}

}  // namespace rytov
