#include "rytov/greens.hpp"

#include <cmath>
#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <string>

#include "rytov/bessel.hpp"
#include "rytov/csv.hpp"
#include "rytov/errors.hpp"

namespace rytov {
namespace {

void check_radius(double r, const ProblemConfig& cfg, const char* who) {
  if (!(r > 0.0 && r <= cfg.R * (1.0 + 1e-14))) {
    throw DomainError(std::string(who) + ": radius " + std::to_string(r) + " outside (0, R]");
  }
}

struct ModeBessel {
  ScaledValue i_r;
  ScaledValue k_r;
  ScaledValue di_r;
  ScaledValue dk_r;
};

ModeBessel mode_bessel(int n, double x) {
  const BesselDerivatives d = bessel_pair_derivatives(n, x);
  return {bessel_i(n, x), bessel_k(n, x), d.di, d.dk};
}

}  // namespace

ScaledValue robin_ratio(int n, const ProblemConfig& cfg) {
  n = std::abs(n);
  const double x = cfg.k * cfg.R;
  const double kl = cfg.k * cfg.ell;
  const ModeBessel b = mode_bessel(n, x);
  return (b.k_r + kl * b.dk_r) / (b.i_r + kl * b.di_r);
}

double g_mode(int n, double r, double r_prime, const ProblemConfig& cfg) {
  check_radius(r, cfg, "g_mode");
  check_radius(r_prime, cfg, "g_mode");
  n = std::abs(n);
  const double lo = std::min(r, r_prime);
  const double hi = std::max(r, r_prime);
  const ScaledValue direct = bessel_k(n, cfg.k * hi) * bessel_i(n, cfg.k * lo);
  const ScaledValue reflected =
      robin_ratio(n, cfg) * bessel_i(n, cfg.k * r) * bessel_i(n, cfg.k * r_prime);
  return (direct - reflected).to_double();
}

double g_mode_dr(int n, double r, double r_prime, const ProblemConfig& cfg) {
  check_radius(r, cfg, "g_mode_dr");
  check_radius(r_prime, cfg, "g_mode_dr");
  n = std::abs(n);
  const double k = cfg.k;
  const BesselDerivatives dr = bessel_pair_derivatives(n, k * r);
  ScaledValue direct;
  if (r >= r_prime) {
    direct = k * dr.dk * bessel_i(n, k * r_prime);
  } else {
    direct = k * dr.di * bessel_k(n, k * r_prime);
  }
  const ScaledValue reflected = robin_ratio(n, cfg) * k * dr.di * bessel_i(n, k * r_prime);
  return (direct - reflected).to_double();
}

double d_coefficient(int alpha, const ProblemConfig& cfg) {
  alpha = std::abs(alpha);
  return (robin_ratio(alpha, cfg) * bessel_i(alpha, cfg.k * cfg.R)).to_double();
}

double u0_boundary(int alpha, const ProblemConfig& cfg) {
  const double u0 = g_mode(alpha, cfg.R, cfg.R, cfg);
  if (!(u0 > 0.0)) {
    throw NumericalError("u0_boundary: non-positive unperturbed intensity for alpha = " +
                         std::to_string(alpha));
  }
  return u0;
}

GreensTable::GreensTable(const ProblemConfig& cfg, const RadialGrid& grid,
                         std::vector<ModeKernel> modes)
    : cfg_(cfg), grid_(grid), modes_(std::move(modes)) {}

GreensTable build_greens_table(const ProblemConfig& cfg, const RadialGrid& grid) {
  cfg.validate();
  const int nr = grid.size();
  const double k = cfg.k;
  std::vector<ModeKernel> modes;
  modes.reserve(static_cast<std::size_t>(cfg.M_SD));

  std::vector<ScaledValue> iv(static_cast<std::size_t>(nr));
  std::vector<ScaledValue> kv(static_cast<std::size_t>(nr));
  for (int alpha = 1; alpha <= cfg.M_SD; ++alpha) {
    for (int i = 0; i < nr; ++i) {
      iv[static_cast<std::size_t>(i)] = bessel_i(alpha, k * grid.point(i));
      kv[static_cast<std::size_t>(i)] = bessel_k(alpha, k * grid.point(i));
    }
    const ScaledValue ratio = robin_ratio(alpha, cfg);

    // g(r_i, r_n) at arbitrary (i, n); the grid contains R as its last node.
    auto g_at = [&](int i, int n) {
      const auto lo = static_cast<std::size_t>(std::min(i, n));
      const auto hi = static_cast<std::size_t>(std::max(i, n));
      const ScaledValue direct = kv[hi] * iv[lo];
      const ScaledValue reflected =
          ratio * iv[static_cast<std::size_t>(i)] * iv[static_cast<std::size_t>(n)];
      return (direct - reflected).to_double();
    };

    ModeKernel mode;
    mode.alpha = alpha;
    mode.kernel.resize(nr, nr);
    for (int i = 0; i < nr; ++i) {
      for (int n = 0; n <= i; ++n) {
        const double g = g_at(i, n);
        mode.kernel(i, n) = g * grid.point(n);
        mode.kernel(n, i) = g * grid.point(i);
      }
    }
    const int last = nr - 1;
    mode.boundary_row = mode.kernel.row(last).transpose();
    mode.boundary_col = mode.kernel.col(last);
    mode.boundary = mode.kernel(last, last);
    mode.u0 = g_at(last, last);
    mode.d = (ratio * iv[static_cast<std::size_t>(last)]).to_double();
    if (!(mode.u0 > 0.0)) {
      throw NumericalError("build_greens_table: non-positive u0 for alpha = " + std::to_string(alpha));
    }
    modes.push_back(std::move(mode));
  }
  return GreensTable(cfg, grid, std::move(modes));
}

void write_mode_csv(std::ostream& os, const ModeKernel& mode, bool header) {
  if (header) os << "alpha,i,n,value\n";
  for (Eigen::Index i = 0; i < mode.kernel.rows(); ++i) {
    for (Eigen::Index n = 0; n < mode.kernel.cols(); ++n) {
      os << mode.alpha << ',' << (i + 1) << ',' << (n + 1) << ',' << format_real(mode.kernel(i, n))
         << '\n';
    }
  }
}

}  // namespace rytov
