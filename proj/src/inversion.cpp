#include "rytov/inversion.hpp"

#include <algorithm>
#include <string>
#include <variant>

#include "rytov/errors.hpp"

namespace rytov {

LinearizedMap assemble_j1(const GreensTable& table) {
  const int nr = table.grid().size();
  const double weight = table.config().g() * table.grid().spacing();
  LinearizedMap map{Matrix(table.num_modes(), nr)};
  for (int a = 0; a < table.num_modes(); ++a) {
    const ModeKernel& mode = table.mode(a);
    map.j1.row(a) = (weight / mode.boundary) * mode.boundary_row.cwiseProduct(mode.boundary_col).transpose();
  }
  return map;
}

TsvdInverse build_tsvd(const LinearizedMap& map, const SvPolicy& policy) {
  const Matrix& j1 = map.j1;
  if (j1.size() == 0 || !j1.allFinite()) throw NumericalError("build_tsvd: empty or non-finite map");

  const Eigen::JacobiSVD<Matrix> svd(j1, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double floor = kNumericalRankTolerance * s(0);

  Eigen::Index keep = 0;
  if (const auto* count = std::get_if<SvCount>(&policy)) {
    if (count->value < 1 || count->value > s.size()) {
      throw ConfigError("build_tsvd: sv_count " + std::to_string(count->value) + " outside [1, " +
                        std::to_string(s.size()) + "]");
    }
    keep = count->value;
  } else {
    const double sigma0 = std::get<SvThreshold>(policy).sigma0;
    while (keep < s.size() && s(keep) > sigma0) ++keep;
  }
  if (keep > 0 && !(s(keep - 1) >= floor)) {
    throw NumericalError("build_tsvd: retaining " + std::to_string(keep) +
                         " singular values exceeds the numerical rank");
  }

  TsvdInverse inv;
  inv.branch = j1.rows() <= j1.cols() ? TsvdBranch::underdetermined : TsvdBranch::overdetermined;
  inv.policy = policy;
  inv.spectrum = s;
  inv.sigma = s.head(keep);
  inv.j1 = j1;
  const Matrix u = svd.matrixU().leftCols(keep);
  const Matrix v = svd.matrixV().leftCols(keep);
  inv.z = inv.branch == TsvdBranch::underdetermined ? u : v;
  inv.u = u;
  inv.v = v;

  // sum_j sigma_j^-2 J^T z_j z_j^T (underdetermined) and sum_j sigma_j^-2 z_j z_j^T J^T
  // (overdetermined) both reduce to V diag(1/sigma) U^T, using J^T u_j = sigma_j v_j exactly
  // instead of forming the product, which would lose the small singular directions.
  inv.pseudoinverse = v * inv.sigma.cwiseInverse().asDiagonal() * u.transpose();
  return inv;
}

RadialProfile apply_tsvd(const TsvdInverse& inv, const BoundaryData& psi) {
  if (psi.values.size() != inv.pseudoinverse.cols()) {
    throw DomainError("apply_tsvd: data length " + std::to_string(psi.values.size()) + " != M_SD " +
                      std::to_string(inv.pseudoinverse.cols()));
  }
  const Vector coeff = (inv.u.transpose() * psi.values).cwiseQuotient(inv.sigma);
  return {inv.v * coeff, ProfileRole::eta_order_j};
}

RadialProfile projected_truth(const RadialProfile& eta, const LinearizedMap& map, const TsvdInverse& inv) {
  if (eta.values.size() != map.j1.cols()) throw DomainError("projected_truth: profile length mismatch");
  if (map.j1.rows() != inv.pseudoinverse.cols() || eta.values.size() != inv.v.rows()) {
    throw DomainError("projected_truth: map and inverse do not match");
  }
  return {inv.v * (inv.v.transpose() * eta.values), ProfileRole::eta_proj};
}

Matrix projection_matrix(const TsvdInverse& inv) { return inv.v * inv.v.transpose(); }

InverseSeries::InverseSeries(const GreensTable& table, const TsvdInverse& inv)
    : table_(table), inv_(inv), series_(table) {}

const Vector* InverseSeries::intern(const Vector& v) {
  arena_.push_back(v);
  return &arena_.back();
}

const Vector* InverseSeries::first_order(const Vector* data) {
  if (auto it = first_order_cache_.find(data); it != first_order_cache_.end()) return it->second;
  const Vector* out = intern(apply_tsvd(inv_, BoundaryData{*data}).values);
  first_order_cache_.emplace(data, out);
  return out;
}

const Vector* InverseSeries::forward(std::span<const Vector* const> profiles) {
  Key key(profiles.begin(), profiles.end());
  if (auto it = forward_cache_.find(key); it != forward_cache_.end()) return it->second;
  const Vector* out = intern(series_.rytov(profiles));
  ++forward_evaluations_;
  forward_cache_.emplace(std::move(key), out);
  return out;
}

const Vector* InverseSeries::recurse(const Key& data, bool top_level) {
  if (auto it = inverse_cache_.find(data); it != inverse_cache_.end()) {
    if (top_level) last_top_level_compositions_ = 0;
    return it->second;
  }
  const int j = static_cast<int>(data.size());
  Key eta1;
  eta1.reserve(data.size());
  for (const Vector* a : data) eta1.push_back(first_order(a));

  const Vector* result = nullptr;
  if (j == 1) {
    result = eta1.front();
    if (top_level) last_top_level_compositions_ = 0;
  } else {
    std::size_t visited = 0;
    Vector total = Vector::Zero(table_.grid().size());
    for (int m = 1; m <= j - 1; ++m) {
      Vector partial = Vector::Zero(total.size());
      for (const Composition& comp : compositions(j, m)) {
        Key inner;
        inner.reserve(comp.size());
        int start = 0;
        for (int part : comp) {
          inner.push_back(forward(std::span<const Vector* const>(eta1).subspan(start, part)));
          start += part;
        }
        partial -= *recurse(inner, false);
        ++visited;
      }
      total += partial;
    }
    result = intern(total);
    if (top_level) last_top_level_compositions_ = visited;
  }
  inverse_cache_.emplace(data, result);
  return result;
}

RadialProfile InverseSeries::evaluate(std::span<const BoundaryData> args) {
  if (args.empty()) throw DomainError("InverseSeries::evaluate: need at least one argument");
  Key key;
  key.reserve(args.size());
  for (const BoundaryData& a : args) {
    if (a.values.size() != inv_.pseudoinverse.cols()) {
      throw DomainError("InverseSeries::evaluate: data length mismatch");
    }
    auto it = external_.find(&a.values);
    if (it == external_.end() || *it->second != a.values) {
      const Vector* stored = intern(a.values);
      external_[&a.values] = stored;
      key.push_back(stored);
    } else {
      key.push_back(it->second);
    }
  }
  return {*recurse(key, true), ProfileRole::eta_order_j};
}

RadialProfile InverseSeries::order_term(int j, const BoundaryData& psi) {
  if (j < 1) throw DomainError("InverseSeries::order_term: order must be >= 1");
  // Every slot refers to the same interned vector.
  const Vector* stored = nullptr;
  auto it = external_.find(&psi.values);
  if (it != external_.end() && *it->second == psi.values) {
    stored = it->second;
  } else {
    stored = intern(psi.values);
    external_[&psi.values] = stored;
  }
  return {*recurse(Key(static_cast<std::size_t>(j), stored), true), ProfileRole::eta_order_j};
}

RadialProfile inverse_order_j(std::span<const BoundaryData> args, const GreensTable& table,
                              const TsvdInverse& inv) {
  InverseSeries series(table, inv);
  return series.evaluate(args);
}

Reconstruction reconstruct(const BoundaryData& psi, const GreensTable& table, const TsvdInverse& inv,
                           int order) {
  if (order < 1) throw DomainError("reconstruct: order must be >= 1");
  InverseSeries series(table, inv);
  Reconstruction out;
  Vector partial = Vector::Zero(table.grid().size());
  for (int j = 1; j <= order; ++j) {
    RadialProfile term = series.order_term(j, psi);
    partial += term.values;
    out.term_norms.push_back(term.values.norm());
    out.terms.push_back(std::move(term));
    out.partial_sums.push_back({partial, ProfileRole::eta_partial_sum});
  }
  const double g = table.config().g();
  out.mu_a = {g * (Vector::Ones(partial.size()) + partial), ProfileRole::mu_a};

  for (std::size_t j = 1; j < out.term_norms.size(); ++j) {
    if (out.term_norms[j - 1] > 0.0) {
      out.term_ratio = std::max(out.term_ratio, out.term_norms[j] / out.term_norms[j - 1]);
    }
  }
  const ProblemConfig& cfg = table.config();
  const ConvergenceReport rep = estimate_mu_nu(cfg, table);
  double largest = 0.0;
  for (const RadialProfile& p : out.partial_sums) {
    largest = std::max(largest, ball_norm(p.values, table.grid(), cfg.R_a));
  }
  out.radius_product = (rep.mu + 2.0 * rep.nu) * largest;
  out.divergence_suspected = order >= 2 && (out.radius_product >= 1.0 || out.term_ratio >= 1.0);
  return out;
}

}  // namespace rytov
