#pragma once

#include <functional>
#include <vector>

#include "rytov/greens.hpp"
#include "rytov/model.hpp"

namespace rytov {

/// Piecewise-constant eta(r): value[i] on (edge[i-1], edge[i]] with edge[-1] = 0.
/// Zero beyond the last edge.
struct StepProfile {
  std::vector<double> edges;
  std::vector<double> values;

  double average(double lo, double hi) const;
};

/// The layered truth eta_a on (0, R_a].
StepProfile layered_step(const ProblemConfig& cfg);
/// A grid profile read as constant on each cell (r_{i-1}, r_i].
StepProfile grid_step(const RadialProfile& eta, const RadialGrid& grid);

/// Independent finite-difference solution of the mode-n radial problem
///   r^2 v'' + r v' - (k^2 (1 + eta(r)) r^2 + n^2) v = 0 on (0, R)
/// driven by the unit boundary source, which enters as the inhomogeneous Robin condition
/// v(R) + ell v'(R) = ell / R. Second-order central differences on fd_points uniform
/// cells, v(0) = 0 for n >= 1 and a symmetric origin stencil for n = 0; eta enters through
/// its exact average over each node's control cell. Returns v(R).
///
/// Shares no code with the Bessel-based Green's function or the layered solution.
/// Requires fd_points >= 1000 (DomainError otherwise).
double fd_oracle(int n, const StepProfile& eta, const ProblemConfig& cfg, int fd_points);
double fd_oracle(int n, const RadialProfile& eta, const RadialGrid& grid, const ProblemConfig& cfg,
                 int fd_points);

/// Mode-wise surrogates of the convergence-radius constants with p = q = r = 2.
///
/// Norms use the radial measure r dr over B_a = {r <= R_a} (grid nodes with r_i <= R_a);
/// the common angular factor is dropped throughout. With a single detector the boundary
/// norm is the value at the detector, so for each source order alpha
///   mu_alpha = g max_{r_i in B_a} ( sum_{r_n in B_a} g_alpha(r_i, r_n)^2 r_n dr )^{1/2}
///   nu_alpha = g |B_a|^{1/2} max_{y1, y2 in B_a} |g_alpha(R, y1)| |u0_alpha(y2)| / u0_alpha(R)
/// with |B_a| = R_a^2 / 2 and u0_alpha(y) = g_alpha(y, R). mu and nu are the maxima over alpha.
/// These are desk-scale stand-ins, not the continuum constants.
struct ConvergenceReport {
  double mu = 0.0;
  double nu = 0.0;
  double eta_norm = 0.0;
  bool forward_radius_ok = false;
  std::vector<double> mu_per_mode;
  std::vector<double> nu_per_mode;
};

/// Uses cfg.eta_a / R_a for the eta norm; `g_scale` multiplies g in mu and nu only.
ConvergenceReport estimate_mu_nu(const ProblemConfig& cfg, const GreensTable& table, double g_scale = 1.0);

/// (sum_{r_i <= R_a} v_i^2 r_i dr)^{1/2}, the grid version of the L2(B_a) norm used above.
double ball_norm(const Vector& v, const RadialGrid& grid, double R_a);

/// ||a - b|| / ||b|| with weights r_i dr. Returns +inf when ||b|| = 0 and a != 0, and 0 when
/// both vanish.
double rel_l2_error(const RadialProfile& a, const RadialProfile& b, const RadialGrid& grid);

}  // namespace rytov
