#pragma once

// Reference evaluations that share no code with the library.

#include <cmath>

namespace oracle {

// I_n(x) from the ascending series sum_m (x/2)^(2m+n) / (m! (m+n)!) in long double.
inline long double series_i(int n, long double x) {
  if (x == 0.0L) return n == 0 ? 1.0L : 0.0L;
  const long double half = x / 2.0L;
  long double term = std::exp(n * std::log(half) - std::lgamma(static_cast<long double>(n) + 1.0L));
  long double sum = 0.0L;
  for (int m = 0; m < 2000; ++m) {
    sum += term;
    term *= half * half / ((m + 1.0L) * (m + 1.0L + n));
    if (term < sum * 1e-22L) break;
  }
  return sum;
}

// K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt by the trapezoid rule, which converges
// geometrically for this analytic, rapidly decaying integrand.
inline long double quad_k(int n, long double x, long double h = 0.005L) {
  auto f = [&](long double t) { return std::exp(-x * std::cosh(t)) * std::cosh(n * t); };
  long double sum = 0.5L * f(0.0L);
  long double peak = sum;
  for (int j = 1;; ++j) {
    const long double v = f(j * h);
    sum += v;
    peak = std::fmax(peak, v);
    if (j * h > 1.0L && v < peak * 1e-25L) break;
  }
  return sum * h;
}

// I_n(x) = (1/pi) int_0^pi exp(x cos t) cos(n t) dt; trapezoid is spectral for the
// periodic integrand. Only accurate where I_n(x) is not tiny compared with e^x.
inline long double quad_i(int n, long double x, int points = 4096) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double h = pi / points;
  long double sum = 0.5L * (std::exp(x) + std::exp(-x) * ((n % 2) ? -1.0L : 1.0L));
  for (int j = 1; j < points; ++j) sum += std::exp(x * std::cos(j * h)) * std::cos(n * j * h);
  return sum * h / pi;
}

template <typename F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace oracle
