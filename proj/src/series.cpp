#include "rytov/series.hpp"

#include <cmath>
#include <string>

#include "rytov/errors.hpp"

namespace rytov {
namespace {

void append_compositions(int remaining, int parts, Composition& prefix, std::vector<Composition>& out) {
  if (parts == 1) {
    prefix.push_back(remaining);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = 1; first <= remaining - parts + 1; ++first) {
    prefix.push_back(first);
    append_compositions(remaining - first, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

std::vector<const Vector*> pointers(std::span<const RadialProfile> inputs) {
  std::vector<const Vector*> ptrs;
  ptrs.reserve(inputs.size());
  for (const auto& p : inputs) ptrs.push_back(&p.values);
  return ptrs;
}

}  // namespace

std::vector<Composition> compositions(int j, int m) {
  std::vector<Composition> out;
  if (j < 1 || m < 1 || m > j) return out;
  Composition prefix;
  prefix.reserve(static_cast<std::size_t>(m));
  append_compositions(j, m, prefix, out);
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return c;
}

Vector born_k0(const GreensTable& table) {
  Vector k0(table.num_modes());
  for (int a = 0; a < table.num_modes(); ++a) k0(a) = -table.mode(a).boundary;
  return k0;
}

Vector boundary_slice(const BornVector& k, const GreensTable& table) {
  const int nr = table.grid().size();
  Vector out(table.num_modes());
  for (int a = 0; a < table.num_modes(); ++a) out(a) = k.values(a * nr + nr - 1);
  return out;
}

ForwardSeries::ForwardSeries(const GreensTable& table) : table_(table), k0_(born_k0(table)) {}

const Vector& ForwardSeries::born(std::span<const Vector* const> args) {
  if (args.empty()) throw DomainError("ForwardSeries::born: need at least one argument");
  std::vector<const Vector*> key(args.begin(), args.end());
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  const int nr = table_.grid().size();
  const int modes = table_.num_modes();
  const Vector& last = *args.back();
  if (last.size() != nr) {
    throw DomainError("ForwardSeries::born: profile length " + std::to_string(last.size()) +
                      " != N_r " + std::to_string(nr));
  }
  const double weight = table_.config().g() * table_.grid().spacing();

  Vector out(static_cast<Eigen::Index>(modes) * nr);
  if (args.size() == 1) {
    for (int a = 0; a < modes; ++a) {
      const ModeKernel& mode = table_.mode(a);
      out.segment(a * nr, nr).noalias() = weight * (mode.kernel * mode.boundary_col.cwiseProduct(last));
    }
  } else {
    const Vector& prev = born(args.first(args.size() - 1));
    for (int a = 0; a < modes; ++a) {
      const ModeKernel& mode = table_.mode(a);
      out.segment(a * nr, nr).noalias() =
          -weight * (mode.kernel * prev.segment(a * nr, nr).cwiseProduct(last));
    }
  }
  kernel_applications_ += static_cast<std::size_t>(modes);
  return cache_.emplace(std::move(key), std::move(out)).first->second;
}

Vector ForwardSeries::born_boundary(std::span<const Vector* const> args) {
  const Vector& k = born(args);
  const int nr = table_.grid().size();
  Vector out(table_.num_modes());
  for (int a = 0; a < table_.num_modes(); ++a) out(a) = k(a * nr + nr - 1);
  return out;
}

Vector ForwardSeries::rytov(std::span<const Vector* const> args) {
  const int j = static_cast<int>(args.size());
  if (j < 1) throw DomainError("ForwardSeries::rytov: need at least one argument");
  const int modes = table_.num_modes();

  // Boundary values of K over every contiguous run of arguments: runs[start][len - 1].
  std::vector<std::vector<Vector>> runs(static_cast<std::size_t>(j));
  for (int start = 0; start < j; ++start) {
    for (int len = 1; start + len <= j; ++len) {
      runs[static_cast<std::size_t>(start)].push_back(born_boundary(args.subspan(start, len)));
    }
  }

  Vector total = Vector::Zero(modes);
  Vector k0_power = Vector::Ones(modes);
  for (int m = 1; m <= j; ++m) {
    k0_power = k0_power.cwiseProduct(k0_);
    Vector sum = Vector::Zero(modes);
    for (const Composition& comp : compositions(j, m)) {
      Vector product = Vector::Ones(modes);
      int start = 0;
      for (int part : comp) {
        product = product.cwiseProduct(runs[static_cast<std::size_t>(start)][static_cast<std::size_t>(part - 1)]);
        start += part;
      }
      sum += product;
    }
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    total += (sign / m) * sum.cwiseQuotient(k0_power);
  }
  return total;
}

BornVector born_vector(int j, std::span<const RadialProfile> inputs, const GreensTable& table) {
  if (j < 1 || static_cast<int>(inputs.size()) != j) {
    throw DomainError("born_vector: need exactly j >= 1 inputs");
  }
  ForwardSeries series(table);
  const auto ptrs = pointers(inputs);
  return {series.born(ptrs), j};
}

Vector rytov_forward(int j, std::span<const RadialProfile> inputs, const GreensTable& table) {
  if (j < 1 || static_cast<int>(inputs.size()) != j) {
    throw DomainError("rytov_forward: need exactly j >= 1 inputs");
  }
  ForwardSeries series(table);
  const auto ptrs = pointers(inputs);
  return series.rytov(ptrs);
}

Vector discrete_boundary_data(const RadialProfile& eta, const GreensTable& table) {
  const int nr = table.grid().size();
  if (eta.values.size() != nr) throw DomainError("discrete_boundary_data: profile length mismatch");
  const double weight = table.config().g() * table.grid().spacing();
  Vector psi(table.num_modes());
  for (int a = 0; a < table.num_modes(); ++a) {
    const ModeKernel& mode = table.mode(a);
    const Matrix scatter = weight * (mode.kernel * eta.values.asDiagonal());
    const Matrix system = Matrix::Identity(nr, nr) + scatter;
    const Eigen::PartialPivLU<Matrix> lu(system);
    const Vector w = lu.solve(-(scatter * mode.boundary_col));
    if (!w.allFinite()) throw NumericalError("discrete_boundary_data: singular system");
    const double ratio = w(nr - 1) / mode.boundary;
    if (!(ratio > -1.0)) throw NumericalError("discrete_boundary_data: non-positive intensity");
    psi(a) = -std::log1p(ratio);
  }
  return psi;
}

}  // namespace rytov
