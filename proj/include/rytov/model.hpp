#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

namespace rytov {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Keep the `value` largest singular values.
struct SvCount {
  int value = 0;
  friend bool operator==(const SvCount&, const SvCount&) = default;
};

/// Keep singular values strictly above `sigma0`.
struct SvThreshold {
  double sigma0 = 0.0;
  friend bool operator==(const SvThreshold&, const SvThreshold&) = default;
};

using SvPolicy = std::variant<SvCount, SvThreshold>;

/// Physical and discretization parameters of the radial disk problem.
///
/// The background absorption is g = k^2 and the diffusion coefficient is fixed to 1.
/// The detector sits at r = R, theta = 0, so there is one datum per source order.
struct ProblemConfig {
  double k = 1.0;       ///< wavenumber-like parameter, g = k^2
  double R = 3.0;       ///< disk radius
  double R_a = 1.5;     ///< support radius of the perturbation
  double ell = 0.3;     ///< Robin length
  double eta_a = 0.2;   ///< perturbation amplitude inside R_a
  int N_r = 90;         ///< radial grid size
  int M_SD = 90;        ///< number of sources (= data entries)
  SvPolicy sv_policy = SvCount{23};
  int order = 5;        ///< series truncation order N
  double gamma = 0.0;   ///< noise level
  std::uint64_t seed = 0;

  double g() const { return k * k; }

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;

  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

/// Flat `key = value` text, `#` comments. Unknown or duplicated keys are errors.
ProblemConfig parse_config(std::string_view text);
ProblemConfig load_config(const std::string& path);
/// Serializes every field with 17 significant digits; parse_config inverts it exactly.
std::string format_config(const ProblemConfig& cfg);

/// r_i = i * dr for i = 1..N_r with dr = R / N_r, so the last node is the boundary.
class RadialGrid {
 public:
  RadialGrid(double R, int N_r);

  int size() const { return static_cast<int>(points_.size()); }
  double spacing() const { return spacing_; }
  double radius() const { return radius_; }
  /// Zero-based access: point(0) = r_1.
  double point(int i) const { return points_(i); }
  const Vector& points() const { return points_; }

 private:
  double radius_;
  double spacing_;
  Vector points_;
};

RadialGrid make_grid(const ProblemConfig& cfg);

enum class ProfileRole { eta_true, eta_proj, eta_order_j, eta_partial_sum, mu_a };

std::string_view to_string(ProfileRole role);

/// A real function of r sampled on the radial grid.
struct RadialProfile {
  Vector values;
  ProfileRole role = ProfileRole::eta_true;
};

/// Boundary data psi, one entry per source order alpha = 1..M_SD (stored zero-based).
struct BoundaryData {
  Vector values;
};

/// Piecewise-constant truth: eta_a for r_i <= R_a, zero outside.
RadialProfile true_profile(const ProblemConfig& cfg, const RadialGrid& grid);

}  // namespace rytov
