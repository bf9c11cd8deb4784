#include "rytov/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rytov/errors.hpp"

namespace rytov {
namespace {

constexpr int kMinFdPoints = 1000;

// Thomas algorithm; sub[0] and super[n-1] are ignored. Overwrites its inputs.
std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                                      std::vector<double> super, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) throw NumericalError("fd_oracle: singular tridiagonal system");
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * super[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (diag[n - 1] == 0.0) throw NumericalError("fd_oracle: singular tridiagonal system");
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - super[i] * x[i + 1]) / diag[i];
  return x;
}

}  // namespace

double StepProfile::average(double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  double integral = 0.0;
  double left = 0.0;
  for (std::size_t c = 0; c < edges.size(); ++c) {
    const double right = edges[c];
    const double a = std::max(lo, left);
    const double b = std::min(hi, right);
    if (b > a) integral += values[c] * (b - a);
    left = right;
  }
  return integral / (hi - lo);
}

StepProfile layered_step(const ProblemConfig& cfg) { return {{cfg.R_a}, {cfg.eta_a}}; }

StepProfile grid_step(const RadialProfile& eta, const RadialGrid& grid) {
  if (eta.values.size() != grid.size()) throw DomainError("grid_step: profile length mismatch");
  StepProfile s;
  s.edges.assign(grid.points().begin(), grid.points().end());
  s.values.assign(eta.values.begin(), eta.values.end());
  return s;
}

double fd_oracle(int n, const StepProfile& eta, const ProblemConfig& cfg, int fd_points) {
  if (fd_points < kMinFdPoints) {
    throw DomainError("fd_oracle: fd_points must be >= " + std::to_string(kMinFdPoints));
  }
  n = std::abs(n);
  const int M = fd_points;
  const double R = cfg.R;
  const double h = R / M;
  const double k2 = cfg.k * cfg.k;
  const double ell = cfg.ell;
  const double n2 = static_cast<double>(n) * n;

  auto eta_at_node = [&](int j) {
    const double r = j * h;
    return eta.average(std::max(0.0, r - 0.5 * h), std::min(R, r + 0.5 * h));
  };

  // Unknowns v_first..v_M.
  const int first = n == 0 ? 0 : 1;
  const auto size = static_cast<std::size_t>(M - first + 1);
  std::vector<double> sub(size, 0.0), diag(size, 0.0), super(size, 0.0), rhs(size, 0.0);
  const double inv_h2 = 1.0 / (h * h);
  for (int j = first; j <= M; ++j) {
    const auto row = static_cast<std::size_t>(j - first);
    const double q = k2 * (1.0 + eta_at_node(j)) + (j == 0 ? 0.0 : n2 / ((j * h) * (j * h)));
    if (j == 0) {
      // v'(0) = 0 and v'/r -> v'' at the origin: 2 v'' - q v = 0 with ghost v_{-1} = v_1.
      diag[row] = -4.0 * inv_h2 - q;
      super[row] = 4.0 * inv_h2;
    } else if (j < M) {
      const double r = j * h;
      sub[row] = inv_h2 - 0.5 / (h * r);
      diag[row] = -2.0 * inv_h2 - q;
      super[row] = inv_h2 + 0.5 / (h * r);
    } else {
      // Ghost node eliminated with v'(R) = 1/R - v(R)/ell.
      sub[row] = 2.0 * inv_h2;
      diag[row] = -2.0 * inv_h2 - 2.0 / (h * ell) - 1.0 / (R * ell) - q;
      rhs[row] = -(2.0 / (h * R) + 1.0 / (R * R));
    }
  }
  return solve_tridiagonal(std::move(sub), std::move(diag), std::move(super), std::move(rhs)).back();
}

double fd_oracle(int n, const RadialProfile& eta, const RadialGrid& grid, const ProblemConfig& cfg,
                 int fd_points) {
  return fd_oracle(n, grid_step(eta, grid), cfg, fd_points);
}

ConvergenceReport estimate_mu_nu(const ProblemConfig& cfg, const GreensTable& table, double g_scale) {
  const RadialGrid& grid = table.grid();
  const double dr = grid.spacing();
  const double g = cfg.g() * g_scale;
  const double edge = cfg.R_a + 1e-12 * cfg.R;
  int inner = 0;
  while (inner < grid.size() && grid.point(inner) <= edge) ++inner;

  ConvergenceReport rep;
  for (int a = 0; a < table.num_modes(); ++a) {
    const ModeKernel& mode = table.mode(a);
    double mu_sq = 0.0;
    for (int i = 0; i < inner; ++i) {
      double row = 0.0;
      for (int n = 0; n < inner; ++n) {
        const double gval = mode.kernel(i, n) / grid.point(n);
        row += gval * gval * grid.point(n) * dr;
      }
      mu_sq = std::max(mu_sq, row);
    }
    double max_to_detector = 0.0;
    double max_u0 = 0.0;
    for (int n = 0; n < inner; ++n) {
      max_to_detector = std::max(max_to_detector, std::abs(mode.boundary_row(n) / grid.point(n)));
      max_u0 = std::max(max_u0, std::abs(mode.boundary_col(n) / cfg.R));
    }
    const double ball = std::sqrt(0.5 * cfg.R_a * cfg.R_a);
    rep.mu_per_mode.push_back(g * std::sqrt(mu_sq));
    rep.nu_per_mode.push_back(g * ball * max_to_detector * max_u0 / mode.u0);
  }
  rep.mu = rep.mu_per_mode.empty() ? 0.0 : *std::max_element(rep.mu_per_mode.begin(), rep.mu_per_mode.end());
  rep.nu = rep.nu_per_mode.empty() ? 0.0 : *std::max_element(rep.nu_per_mode.begin(), rep.nu_per_mode.end());

  rep.eta_norm = ball_norm(true_profile(cfg, grid).values, grid, cfg.R_a);
  rep.forward_radius_ok = rep.eta_norm * (rep.mu + rep.nu) < 1.0;
  return rep;
}

double ball_norm(const Vector& v, const RadialGrid& grid, double R_a) {
  if (v.size() != grid.size()) throw DomainError("ball_norm: profile length mismatch");
  const double edge = R_a + 1e-12 * grid.radius();
  double sum = 0.0;
  for (int i = 0; i < grid.size() && grid.point(i) <= edge; ++i) sum += v(i) * v(i) * grid.point(i);
  return std::sqrt(sum * grid.spacing());
}

double rel_l2_error(const RadialProfile& a, const RadialProfile& b, const RadialGrid& grid) {
  if (a.values.size() != grid.size() || b.values.size() != grid.size()) {
    throw DomainError("rel_l2_error: profile length mismatch");
  }
  const Vector w = grid.points() * grid.spacing();
  const double num = std::sqrt((w.array() * (a.values - b.values).array().square()).sum());
  const double den = std::sqrt((w.array() * b.values.array().square()).sum());
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace rytov
