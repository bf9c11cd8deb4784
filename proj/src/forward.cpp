#include "rytov/forward.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rytov/bessel.hpp"
#include "rytov/errors.hpp"
#include "rytov/greens.hpp"

namespace rytov {
namespace {

constexpr double kMinReciprocalCondition = 1e-14;

}  // namespace

LayerCoefficients solve_layer_coefficients(int n, const ProblemConfig& cfg) {
  if (!(1.0 + cfg.eta_a > 0.0)) throw DomainError("solve_layer_coefficients: need 1 + eta_a > 0");
  if (n < 0) throw DomainError("solve_layer_coefficients: negative order");
  const double k = cfg.k;
  const double k_a = k * std::sqrt(1.0 + cfg.eta_a);
  const double kl = k * cfg.ell;

  const double x_in = k_a * cfg.R_a;   // inner medium at the interface
  const double x_out = k * cfg.R_a;    // outer medium at the interface
  const double x_bnd = k * cfg.R;      // boundary

  const ScaledValue i_in = bessel_i(n, x_in);
  const ScaledValue di_in = bessel_pair_derivatives(n, x_in).di;
  const ScaledValue i_out = bessel_i(n, x_out);
  const ScaledValue k_out = bessel_k(n, x_out);
  const BesselDerivatives d_out = bessel_pair_derivatives(n, x_out);
  const ScaledValue i_bnd = bessel_i(n, x_bnd);
  const ScaledValue k_bnd = bessel_k(n, x_bnd);
  const BesselDerivatives d_bnd = bessel_pair_derivatives(n, x_bnd);

  // Logarithmic derivatives at the interface, O(n / x) in size.
  const double lambda = (k_a * di_in / i_in).to_double();
  const double kappa_i = (k * d_out.di / i_out).to_double();
  const double kappa_k = (k * d_out.dk / k_out).to_double();

  // Robin row in scaled unknowns: p * b_scaled + q * c_scaled = 0, normalized by q.
  const ScaledValue robin_k = k_bnd + kl * d_bnd.dk;
  const ScaledValue robin_i = i_bnd + kl * d_bnd.di;
  const double rho = ((robin_k / k_out) / (robin_i / i_out)).to_double();

  Eigen::Matrix3d A;
  A << 1.0, -1.0, -1.0,  //
      lambda, -kappa_k, -kappa_i,  //
      0.0, rho, 1.0;
  const Eigen::Vector3d rhs(1.0, kappa_i, 0.0);

  const Eigen::PartialPivLU<Eigen::Matrix3d> lu(A);
  if (!(lu.rcond() > kMinReciprocalCondition)) {
    throw NumericalError("solve_layer_coefficients: near-singular system at n = " + std::to_string(n));
  }
  const Eigen::Vector3d x = lu.solve(rhs);

  const Eigen::Vector3d r = A * x - rhs;
  const Eigen::Vector3d scale = A.cwiseAbs() * x.cwiseAbs() + rhs.cwiseAbs();

  LayerCoefficients out;
  out.n = n;
  out.k_a = k_a;
  out.a_scaled = x(0);
  out.b_scaled = x(1);
  out.c_scaled = x(2);
  out.residual = r.cwiseAbs().maxCoeff() / scale.maxCoeff();

  // (u - u0)/u0 at R = c_scaled + b_scaled * I(kR_a) K(kR) / (I(kR) K(kR_a)).
  const double tau = ((i_out * k_bnd) / (i_bnd * k_out)).to_double();
  out.relative_change = out.c_scaled + out.b_scaled * tau;

  const ScaledValue ratio = robin_k / robin_i;
  const ScaledValue u0_interface = i_out * (k_bnd - ratio * i_bnd);
  const ScaledValue d = ratio * i_bnd;
  out.a = (ScaledValue(out.a_scaled) * u0_interface / i_in).to_double();
  out.b = (ScaledValue(out.b_scaled) * u0_interface / k_out).to_double();
  out.c = (ScaledValue(out.c_scaled) * u0_interface / i_out - d).to_double();
  return out;
}

BoundaryFields exact_boundary_fields(const ProblemConfig& cfg) {
  cfg.validate();
  BoundaryFields f{Vector(cfg.M_SD), Vector(cfg.M_SD)};
  for (int alpha = 1; alpha <= cfg.M_SD; ++alpha) {
    const double u0 = u0_boundary(alpha, cfg);
    const LayerCoefficients c = solve_layer_coefficients(alpha, cfg);
    f.u0(alpha - 1) = u0;
    f.u(alpha - 1) = u0 * (1.0 + c.relative_change);
  }
  return f;
}

BoundaryData exact_boundary_data(const ProblemConfig& cfg) {
  cfg.validate();
  BoundaryData psi{Vector(cfg.M_SD)};
  for (int alpha = 1; alpha <= cfg.M_SD; ++alpha) {
    const LayerCoefficients c = solve_layer_coefficients(alpha, cfg);
    if (!(1.0 + c.relative_change > 0.0)) {
      throw NumericalError("exact_boundary_data: non-positive u/u0 at alpha = " + std::to_string(alpha));
    }
    psi.values(alpha - 1) = -std::log1p(c.relative_change);
  }
  return psi;
}

BoundaryData log_ratio_data(const Vector& u0, const Vector& u) {
  if (u0.size() != u.size()) throw DomainError("log_ratio_data: length mismatch");
  BoundaryData psi{Vector(u0.size())};
  for (Eigen::Index i = 0; i < u0.size(); ++i) {
    const double q = u0(i) / u(i);
    if (!(q > 0.0) || !std::isfinite(q)) {
      throw NumericalError("log_ratio_data: non-positive ratio at alpha = " + std::to_string(i + 1));
    }
    psi.values(i) = std::log(q);
  }
  return psi;
}

double GaussianStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::pair<Vector, Vector> add_noise(const Vector& u0, const Vector& u, double gamma,
                                    std::uint64_t seed) {
  if (u0.size() != u.size()) throw DomainError("add_noise: length mismatch");
  if (!(gamma >= 0.0)) throw DomainError("add_noise: gamma must be >= 0");
  if (gamma == 0.0 || u0.size() == 0) return {u0, u};

  const double mean = u0.mean();
  const double stddev = std::sqrt((u0.array() - mean).square().mean());
  const double sigma = gamma * stddev;

  GaussianStream stream(seed);
  auto perturb = [&](const Vector& clean) {
    Vector noisy = clean;
    for (Eigen::Index i = 0; i < clean.size(); ++i) {
      const double candidate = clean(i) + sigma * stream.next();
      if (candidate >= 0.0) noisy(i) = candidate;
    }
    return noisy;
  };
  Vector noisy_u0 = perturb(u0);
  Vector noisy_u = perturb(u);
  return {std::move(noisy_u0), std::move(noisy_u)};
}

}  // namespace rytov
