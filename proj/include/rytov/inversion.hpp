#pragma once

#include <deque>
#include <map>
#include <span>
#include <vector>

#include "rytov/diagnostics.hpp"
#include "rytov/greens.hpp"
#include "rytov/model.hpp"
#include "rytov/series.hpp"

namespace rytov {

/// Linearized data map J_1 (M_SD x N_r): J_1 b equals the first-order Rytov term.
struct LinearizedMap {
  Matrix j1;
};

/// {J_1}_{alpha,i} = g dr G^(alpha)(R, r_i) G^(alpha)(r_i, R) / G^(alpha)(R, R),
/// i.e. -K_1(e_i)/K_0 at the boundary, so J_1 b matches rytov_forward(1, b).
LinearizedMap assemble_j1(const GreensTable& table);

enum class TsvdBranch {
  underdetermined,  ///< M_SD <= N_r, eigenvectors z_j of J_1 J_1^T (data space)
  overdetermined,   ///< M_SD >  N_r, eigenvectors z_j of J_1^T J_1 (model space)
};

/// Singular values below this fraction of the largest are treated as numerically zero.
inline constexpr double kNumericalRankTolerance = 1e-13;

/// Truncated-SVD regularized pseudoinverse of J_1.
struct TsvdInverse {
  TsvdBranch branch = TsvdBranch::underdetermined;
  SvPolicy policy = SvCount{1};
  Vector spectrum;      ///< all singular values of J_1, descending
  Vector sigma;         ///< retained singular values, descending
  Matrix z;             ///< retained eigenvectors of the Gram matrix, one per column
  Matrix u;             ///< retained left singular vectors (data space)
  Matrix v;             ///< retained right singular vectors (model space)
  Matrix j1;            ///< the map being inverted
  Matrix pseudoinverse; ///< N_r x M_SD
};

/// Builds the regularized inverse. The Gram-matrix eigenpairs (sigma_j^2, z_j) are taken
/// from a one-sided Jacobi SVD of J_1, which keeps singular values far below
/// sqrt(eps) * sigma_max accurate. Throws NumericalError if the policy would retain a
/// value below kNumericalRankTolerance * sigma_max.
TsvdInverse build_tsvd(const LinearizedMap& map, const SvPolicy& policy);

/// eta_1 = J_1,reg^+ psi, applied in factored form V (Sigma^-1 (U^T psi)).
RadialProfile apply_tsvd(const TsvdInverse& inv, const BoundaryData& psi);

/// eta_proj = J_1,reg^+ J_1 eta: the best reconstruction reachable through the truncation.
/// Applied as V_k V_k^T eta; forming J_1^+ J_1 eta directly costs eps sigma_1 / sigma_k.
RadialProfile projected_truth(const RadialProfile& eta, const LinearizedMap& map, const TsvdInverse& inv);

/// The orthogonal projector V_k V_k^T onto the retained model-space directions.
Matrix projection_matrix(const TsvdInverse& inv);

/// Recursive inverse Rytov operators
///   calJ_1(a_1) = J_1^+ a_1
///   calJ_j(a_1..a_j) = -sum_{m=1}^{j-1} sum_{i_1+..+i_m=j}
///                      calJ_m(J_{i_1}(eta_1..eta_{i_1}), ..., J_{i_m}(eta_{j-i_m+1}..eta_j))
/// with eta_i = J_1^+ a_i. Partial sums are accumulated m-ascending, compositions in
/// lexicographic order, so results do not depend on evaluation schedule.
///
/// Intermediate vectors live in an internal arena and every stage is memoized by the
/// identity of its inputs, so the repeated arguments of calJ_j(psi, ..., psi) are cheap.
class InverseSeries {
 public:
  InverseSeries(const GreensTable& table, const TsvdInverse& inv);

  /// calJ_j(args[0], ..., args[j-1]) for arbitrary data vectors.
  RadialProfile evaluate(std::span<const BoundaryData> args);

  /// calJ_j(psi, ..., psi).
  RadialProfile order_term(int j, const BoundaryData& psi);

  /// Compositions visited directly by the most recent top-level call (not counting
  /// nested calls or memo hits below it).
  std::size_t last_top_level_compositions() const { return last_top_level_compositions_; }
  std::size_t forward_evaluations() const { return forward_evaluations_; }

 private:
  using Key = std::vector<const Vector*>;

  const Vector* intern(const Vector& v);
  const Vector* first_order(const Vector* data);
  const Vector* forward(std::span<const Vector* const> profiles);
  const Vector* recurse(const Key& data, bool top_level);

  const GreensTable& table_;
  const TsvdInverse& inv_;
  ForwardSeries series_;
  std::deque<Vector> arena_;
  std::map<const Vector*, const Vector*> first_order_cache_;
  std::map<Key, const Vector*> forward_cache_;
  std::map<Key, const Vector*> inverse_cache_;
  std::map<const Vector*, const Vector*> external_;
  std::size_t last_top_level_compositions_ = 0;
  std::size_t forward_evaluations_ = 0;
};

/// calJ_j(args) as a fresh evaluation.
RadialProfile inverse_order_j(std::span<const BoundaryData> args, const GreensTable& table,
                              const TsvdInverse& inv);

struct Reconstruction {
  std::vector<RadialProfile> terms;         ///< eta_1 .. eta_N
  std::vector<RadialProfile> partial_sums;  ///< eta^(1) .. eta^(N)
  RadialProfile mu_a;                       ///< g (1 + eta^(N))
  std::vector<double> term_norms;           ///< ||eta_j||_2
  /// Largest observed ||eta_j|| / ||eta_{j-1}||, 0 with fewer than two terms.
  double term_ratio = 0.0;
  /// (mu + 2 nu) max_j ||eta^(j)|| with norms over B_a (see estimate_mu_nu); the
  /// inverse series is only known to converge while this stays below 1.
  double radius_product = 0.0;
  /// radius_product >= 1 or term_ratio >= 1, for order >= 2. Reported, never thrown.
  bool divergence_suspected = false;
};

/// eta_j = calJ_j(psi, ..., psi) for j = 1..order, their partial sums and mu_a.
Reconstruction reconstruct(const BoundaryData& psi, const GreensTable& table, const TsvdInverse& inv,
                           int order);

}  // namespace rytov
