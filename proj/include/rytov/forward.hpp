#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>

#include "rytov/model.hpp"

namespace rytov {

/// Mode-n solution of the two-layer disk: interior field a_n I_n(k_a r) for r <= R_a,
/// exterior I_n(kr) K_n(kR) + b_n K_n(kr) + c_n I_n(kr) for R_a < r <= R.
///
/// The 3x3 interface/boundary system is solved for the scattered part relative to the
/// unperturbed field, with every unknown divided by its natural Bessel scale:
///   a_scaled = a_n I_n(k_a R_a) / u0(R_a)
///   b_scaled = b_n K_n(k R_a) / u0(R_a)
///   c_scaled = (c_n + d_n) I_n(k R_a) / u0(R_a)
/// where u0(r) = g_n(r, R). The boundary (Robin) row carries the right-hand side
/// -I_n(kR) (K_n(kR) + k ell K_n'(kR)) in unscaled form; with it eta_a = 0 gives b_n = 0,
/// c_n = -d_n and psi = 0 exactly.
struct LayerCoefficients {
  int n = 0;
  double k_a = 0.0;
  double a_scaled = 0.0;
  double b_scaled = 0.0;
  double c_scaled = 0.0;
  /// Unscaled coefficients; may overflow or underflow to inf/0 at extreme orders.
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  /// (u - u0) / u0 at r = R, theta = 0.
  double relative_change = 0.0;
  /// max_row |A x - rhs| / max_row(|A| |x| + |rhs|) for the scaled system.
  double residual = 0.0;
};

/// Throws DomainError if 1 + eta_a <= 0, NumericalError if the system is near singular
/// (reciprocal condition estimate below 1e-14).
LayerCoefficients solve_layer_coefficients(int n, const ProblemConfig& cfg);

/// Boundary intensities at the detector for alpha = 1..M_SD.
struct BoundaryFields {
  Vector u0;
  Vector u;
};

BoundaryFields exact_boundary_fields(const ProblemConfig& cfg);

/// psi_alpha = ln(u0 / u) for the layered truth, computed as -log1p((u - u0)/u0) so the
/// tiny high-order entries keep full relative precision.
BoundaryData exact_boundary_data(const ProblemConfig& cfg);

/// psi = ln(u0 / u) entrywise. Throws NumericalError on a non-positive ratio.
BoundaryData log_ratio_data(const Vector& u0, const Vector& u);

/// PRNG identifier recorded in run manifests.
inline constexpr std::string_view kNoiseAlgorithm = "mt19937_64/box-muller";

/// Independent N(0, (gamma * std(u0))^2) perturbations, std being the population
/// standard deviation of the clean u0 entries. Draw order: all u0 entries, then all u
/// entries, one draw per entry. An entry whose perturbed value would be negative keeps
/// its clean value (its draw is still consumed).
std::pair<Vector, Vector> add_noise(const Vector& u0, const Vector& u, double gamma,
                                    std::uint64_t seed);

/// Seeded standard-normal stream: mt19937_64 words to 53-bit uniforms, Box-Muller pairs.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform();

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rytov
