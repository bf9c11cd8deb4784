#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rytov/greens.hpp"
#include "rytov/model.hpp"

namespace rytov {

/// Ordered tuple of positive integers (i_1, ..., i_m).
using Composition = std::vector<int>;

/// All compositions of j into m positive parts, lexicographically ordered.
/// Empty when m > j or either argument is below 1.
std::vector<Composition> compositions(int j, int m);

/// Binomial coefficient C(n, k) for small arguments; 0 when k is out of [0, n].
std::uint64_t binomial(int n, int k);

/// Discrete Born vector K_j. Entry i + alpha * N_r (zero-based i, alpha) holds the
/// value at r_i for source order alpha + 1; the boundary entry of block alpha is
/// i = N_r - 1 because r_{N_r} = R.
struct BornVector {
  Vector values;
  int order = 0;
};

/// {K_0}_alpha = -G^(alpha)(R, R), one entry per source order.
Vector born_k0(const GreensTable& table);

/// Boundary entries {K_j}_{alpha N_r} of a Born vector.
Vector boundary_slice(const BornVector& k, const GreensTable& table);

/// Evaluates the multilinear forward maps of the discrete problem:
///   K_1(b)   = g dr sum_n G(r_i, r_n) G(r_n, R) b_n
///   K_j(b..) = -g dr sum_n G(r_i, r_n) b_j[n] K_{j-1}(b_1..b_{j-1})[n]
///   J_j(b..) = sum_m (-1)^m / (m K_0^m) sum_{i_1+..+i_m=j} prod_p K_{i_p}(slice_p)
/// where slice_p is the p-th run of i_p consecutive arguments.
///
/// Born vectors are cached by argument identity (the addresses of the input vectors),
/// so callers must keep the inputs alive and unmodified while the cache is in use.
class ForwardSeries {
 public:
  explicit ForwardSeries(const GreensTable& table);

  const GreensTable& table() const { return table_; }

  /// K_j(args[0], ..., args[j-1]).
  const Vector& born(std::span<const Vector* const> args);

  /// Boundary entries of K_j(args), one per source order.
  Vector born_boundary(std::span<const Vector* const> args);

  /// J_j(args), one value per source order.
  Vector rytov(std::span<const Vector* const> args);

  void clear_cache() { cache_.clear(); }
  std::size_t cache_size() const { return cache_.size(); }
  /// Number of mode-wise kernel applications performed so far.
  std::size_t kernel_applications() const { return kernel_applications_; }

 private:
  const GreensTable& table_;
  Vector k0_;
  std::map<std::vector<const Vector*>, Vector> cache_;
  std::size_t kernel_applications_ = 0;
};

/// K_j(inputs) as a fresh evaluation.
BornVector born_vector(int j, std::span<const RadialProfile> inputs, const GreensTable& table);

/// J_j(inputs) as a fresh evaluation; argument order matters for asymmetric inputs.
Vector rytov_forward(int j, std::span<const RadialProfile> inputs, const GreensTable& table);

/// Sum of the whole discrete series without truncation. Per mode the scattered field
/// w = u - G(., R) solves (I + g dr G diag(eta)) w = -g dr G (eta o G(., R)), and
/// psi = -log1p(w_R / G(R, R)). Throws NumericalError if a system is singular or
/// u_R / u0_R is not positive.
Vector discrete_boundary_data(const RadialProfile& eta, const GreensTable& table);

}  // namespace rytov
