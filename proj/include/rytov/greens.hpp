#pragma once

#include <iosfwd>
#include <vector>

#include "rytov/model.hpp"
#include "rytov/scaled.hpp"

namespace rytov {

/// Robin ratio (K_n(kR) + k ell K_n'(kR)) / (I_n(kR) + k ell I_n'(kR)), kept scaled.
ScaledValue robin_ratio(int n, const ProblemConfig& cfg);

/// Radial Green's function mode
///   g_n(r, r') = K_n(k max) I_n(k min) - ratio_n I_n(k r) I_n(k r'),
/// solving r^2 g'' + r g' - (k^2 r^2 + n^2) g = -r delta(r - r') with g + ell g' = 0 at R.
/// Negative n maps to |n|. Throws DomainError unless 0 < r, r' <= R.
double g_mode(int n, double r, double r_prime, const ProblemConfig& cfg);

/// d/dr g_n(r, r'). At r == r' the exterior (r > r') branch is used.
double g_mode_dr(int n, double r, double r_prime, const ProblemConfig& cfg);

/// d_alpha = ratio_alpha * I_alpha(kR).
double d_coefficient(int alpha, const ProblemConfig& cfg);

/// Unperturbed boundary intensity u_0 = g_alpha(R, R). Throws NumericalError if not positive.
double u0_boundary(int alpha, const ProblemConfig& cfg);

/// Per-mode kernels G^(alpha)(r_i, r_n) = g_alpha(r_i, r_n) r_n on the radial grid.
struct ModeKernel {
  int alpha = 0;
  Matrix kernel;          ///< (i, n) -> G^(alpha)(r_i, r_n)
  Vector boundary_row;    ///< n -> G^(alpha)(R, r_n)
  Vector boundary_col;    ///< n -> G^(alpha)(r_n, R)
  double boundary = 0.0;  ///< G^(alpha)(R, R)
  double u0 = 0.0;        ///< g_alpha(R, R)
  double d = 0.0;         ///< d_alpha
};

class GreensTable {
 public:
  GreensTable(const ProblemConfig& cfg, const RadialGrid& grid, std::vector<ModeKernel> modes);

  const ProblemConfig& config() const { return cfg_; }
  const RadialGrid& grid() const { return grid_; }
  int num_modes() const { return static_cast<int>(modes_.size()); }
  /// Zero-based: mode(0) holds alpha = 1.
  const ModeKernel& mode(int index) const { return modes_[static_cast<std::size_t>(index)]; }

 private:
  ProblemConfig cfg_;
  RadialGrid grid_;
  std::vector<ModeKernel> modes_;
};

/// Dense kernels for alpha = 1..M_SD. Bessel products are formed in scaled arithmetic
/// and demoted to doubles only after the K * I pairing.
GreensTable build_greens_table(const ProblemConfig& cfg, const RadialGrid& grid);

/// Writes one mode as CSV rows `alpha,i,n,value` (1-based indices, row-major), preceded by
/// the header unless `header` is false (for appending further modes).
void write_mode_csv(std::ostream& os, const ModeKernel& mode, bool header = true);

}  // namespace rytov
