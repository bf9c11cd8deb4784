#pragma once

#include <vector>

#include "rytov/scaled.hpp"

namespace rytov {

/// Largest integer order accepted by the Bessel routines.
inline constexpr int kMaxBesselOrder = 200;
/// Largest argument accepted by the Bessel routines.
inline constexpr double kMaxBesselArgument = 50.0;

/// Modified Bessel function of the first kind I_n(x), 0 <= n <= 200, 0 <= x <= 50.
///
/// Evaluated from the ascending power series, whose terms are all positive, so the
/// relative error stays near the number of summed terms times machine epsilon.
/// Throws DomainError outside the range.
ScaledValue bessel_i(int n, double x);

/// Modified Bessel function of the second kind K_n(x), 0 <= n <= 200, 0 < x <= 50.
///
/// K_0 and K_1 come from their logarithmic series for x <= 2 and from Steed's
/// continued fraction above; higher orders use the (stable) upward recurrence.
ScaledValue bessel_k(int n, double x);

/// I_0(x), ..., I_nmax(x) by Miller's backward recurrence normalized with I_0.
std::vector<ScaledValue> bessel_i_sequence(int nmax, double x);

/// K_0(x), ..., K_nmax(x) by upward recurrence.
std::vector<ScaledValue> bessel_k_sequence(int nmax, double x);

struct BesselDerivatives {
  ScaledValue di;  ///< I_n'(x)
  ScaledValue dk;  ///< K_n'(x)
};

/// I_n' = (I_{n-1} + I_{n+1}) / 2 and K_n' = -(K_{n-1} + K_{n+1}) / 2, with
/// I_{-1} = I_1 and K_{-1} = K_1 at n = 0. Requires x > 0.
BesselDerivatives bessel_pair_derivatives(int n, double x);

}  // namespace rytov
