#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "rytov/errors.hpp"
#include "rytov/forward.hpp"
#include "rytov/greens.hpp"
#include "rytov/inversion.hpp"
#include "rytov/series.hpp"

using namespace rytov;

namespace {

struct Fixture {
  ProblemConfig cfg;
  RadialGrid grid = make_grid(cfg);
  GreensTable table = build_greens_table(cfg, grid);
  LinearizedMap map = assemble_j1(table);
  TsvdInverse inv = build_tsvd(map, SvCount{23});
  std::mt19937_64 rng{77};

  // Data in the range of the map, so that J_1^+ psi stays of order `scale`.
  BoundaryData data(double scale) { return {map.j1 * random(90, scale)}; }

  Vector random(Eigen::Index n, double scale) {
    std::normal_distribution<double> d(0.0, scale);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = d(rng);
    return v;
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

LinearizedMap identity_map(int n) { return {Matrix::Identity(n, n)}; }

}  // namespace

TEST_SUITE("linearized map") {
  TEST_CASE("matches the first forward order on random profiles") {
    Fixture& f = fixture();
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const RadialProfile b{f.random(90, 1.0)};
      const Vector direct = rytov_forward(1, std::vector<RadialProfile>{b}, f.table);
      worst = std::max(worst, (f.map.j1 * b.values - direct).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-13);
  }

  TEST_CASE("entries positive and the row formula") {
    Fixture& f = fixture();
    // Nonnegative; exact zeros only where r_i^(2 alpha) underflows.
    CHECK((f.map.j1.array() >= 0.0).all());
    CHECK((f.map.j1.topRows(80).array() > 0.0).all());
    const double w = f.cfg.g() * f.grid.spacing();
    const ModeKernel& m = f.table.mode(4);
    for (int i : {0, 30, 89}) {
      CHECK(f.map.j1(4, i) == doctest::Approx(w * m.boundary_row(i) * m.boundary_col(i) / m.boundary).epsilon(1e-14));
      // G(r_i, R) = G(R, r_i) R / r_i: the row is the squared boundary kernel times R / r_i.
      CHECK(f.map.j1(4, i) ==
            doctest::Approx(w * m.boundary_row(i) * m.boundary_row(i) / m.boundary * f.cfg.R / f.grid.point(i))
                .epsilon(1e-12));
    }
  }

  TEST_CASE("columns carry an explicit dr factor") {
    Fixture& f = fixture();
    ProblemConfig coarse = f.cfg;
    coarse.N_r = 45;
    const GreensTable t2 = build_greens_table(coarse, make_grid(coarse));
    const LinearizedMap m2 = assemble_j1(t2);
    // Node 2i+1 of the fine grid sits at node i of the coarse one.
    for (int a : {0, 10, 60}) {
      for (int i : {0, 10, 44}) CHECK(m2.j1(a, i) == doctest::Approx(2.0 * f.map.j1(a, 2 * i + 1)).epsilon(1e-12));
    }
  }
}

TEST_SUITE("tsvd") {
  TEST_CASE("reference problem keeps exactly 23 values") {
    Fixture& f = fixture();
    CHECK(f.inv.sigma.size() == 23);
    CHECK(f.inv.branch == TsvdBranch::underdetermined);
    CHECK(f.inv.spectrum.size() == 90);
    for (int j = 1; j < 23; ++j) CHECK(f.inv.sigma(j) < f.inv.sigma(j - 1));
    CHECK(f.inv.sigma(22) > 0.0);
  }

  TEST_CASE("Gram eigen-residual") {
    Fixture& f = fixture();
    const Matrix gram = f.map.j1 * f.map.j1.transpose();
    const double smax2 = f.inv.sigma(0) * f.inv.sigma(0);
    for (int j = 0; j < 23; ++j) {
      const Vector z = f.inv.z.col(j);
      CHECK((gram * z - f.inv.sigma(j) * f.inv.sigma(j) * z).norm() <= 1e-10 * smax2);
    }
  }

  TEST_CASE("projection is idempotent and symmetric") {
    Fixture& f = fixture();
    const Matrix p = projection_matrix(f.inv);
    CHECK((p * p - p).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(p.trace() == doctest::Approx(23.0).epsilon(1e-12));
    // Explicit J_1^+ J_1 agrees up to the conditioning of the retained block.
    const double cond = f.inv.sigma(0) / f.inv.sigma(22);
    CHECK((f.inv.pseudoinverse * f.map.j1 - p).cwiseAbs().maxCoeff() <= 100 * 2.2e-16 * cond);
    ProblemConfig c = f.cfg;
    c.eta_a = 1.0;
    const RadialProfile eta = true_profile(c, f.grid);
    const RadialProfile once = projected_truth(eta, f.map, f.inv);
    CHECK(once.role == ProfileRole::eta_proj);
    const RadialProfile twice = projected_truth(once, f.map, f.inv);
    CHECK((twice.values - once.values).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(projected_truth(RadialProfile{Vector::Zero(90)}, f.map, f.inv).values.isZero());
  }

  TEST_CASE("threshold policy") {
    Fixture& f = fixture();
    const double between = 0.5 * (f.inv.spectrum(8) + f.inv.spectrum(9));
    const TsvdInverse t = build_tsvd(f.map, SvThreshold{between});
    CHECK(t.sigma.size() == 9);
    const Matrix p = t.pseudoinverse * f.map.j1;  // well conditioned at 9 values
    CHECK((p * p - p).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("retained directions are inverted, discarded ones vanish") {
    Fixture& f = fixture();
    const Eigen::JacobiSVD<Matrix> svd(f.map.j1, Eigen::ComputeFullU);
    const double eps = 2.2e-16;
    for (int j : {0, 5, 22}) {
      const BoundaryData kept{f.inv.u.col(j)};
      const RadialProfile eta1 = apply_tsvd(f.inv, kept);
      // Backward error eps ||J_1|| seen through 1 / sigma_j.
      CHECK((f.map.j1 * eta1.values - kept.values).norm() <= 100 * eps * f.inv.sigma(0) / f.inv.sigma(j));
      CHECK(eta1.values.norm() == doctest::Approx(1.0 / f.inv.sigma(j)).epsilon(1e-6));
    }
    // A discarded direction only leaks through the rounding in U^T u.
    const BoundaryData dropped{svd.matrixU().col(40)};
    CHECK(apply_tsvd(f.inv, dropped).values.norm() <= 100 * eps / f.inv.sigma(22));
    CHECK(apply_tsvd(f.inv, BoundaryData{Vector::Zero(90)}).values.isZero());
  }

  TEST_CASE("branch formulas of the Gram route") {
    Fixture& f = fixture();
    // Underdetermined: sum sigma^-2 (z^T psi) J^T z on a well-conditioned truncation.
    const TsvdInverse t = build_tsvd(f.map, SvCount{6});
    const Vector psi = f.random(90, 1e-3);
    Vector eta = Vector::Zero(90);
    for (int j = 0; j < 6; ++j) {
      const Vector z = t.z.col(j);
      eta += (z.dot(psi) / (t.sigma(j) * t.sigma(j))) * (f.map.j1.transpose() * z);
    }
    const Vector got = apply_tsvd(t, BoundaryData{psi}).values;
    CHECK((got - eta).norm() <= 1e-9 * eta.norm());

    // Overdetermined: sum sigma^-2 (z^T J^T psi) z.
    const LinearizedMap tall{f.map.j1.topRows(90).leftCols(40)};
    const TsvdInverse o = build_tsvd(tall, SvCount{5});
    CHECK(o.branch == TsvdBranch::overdetermined);
    Vector eta_o = Vector::Zero(40);
    for (int j = 0; j < 5; ++j) {
      const Vector z = o.z.col(j);
      eta_o += (z.dot(tall.j1.transpose() * psi) / (o.sigma(j) * o.sigma(j))) * z;
    }
    CHECK((apply_tsvd(o, BoundaryData{psi}).values - eta_o).norm() <= 1e-9 * eta_o.norm());
  }

  TEST_CASE("identity matrix") {
    const TsvdInverse t = build_tsvd(identity_map(6), SvThreshold{0.5});
    CHECK(t.sigma.size() == 6);
    CHECK(t.pseudoinverse.isApprox(Matrix::Identity(6, 6), 1e-15));
  }

  TEST_CASE("errors") {
    Fixture& f = fixture();
    CHECK_THROWS_AS(build_tsvd(f.map, SvCount{91}), ConfigError);
    CHECK_THROWS_AS(build_tsvd(f.map, SvCount{0}), ConfigError);
    CHECK_THROWS_AS(build_tsvd(f.map, SvCount{60}), NumericalError);  // below numerical rank
    CHECK_THROWS_AS(build_tsvd(LinearizedMap{Matrix(0, 0)}, SvCount{1}), NumericalError);
    Matrix bad = Matrix::Identity(3, 3);
    bad(1, 1) = std::nan("");
    CHECK_THROWS_AS(build_tsvd(LinearizedMap{bad}, SvCount{1}), NumericalError);
    CHECK_THROWS_AS(apply_tsvd(f.inv, BoundaryData{Vector::Zero(5)}), DomainError);
  }
}

TEST_SUITE("inverse series") {
  TEST_CASE("first order is the regularized inverse") {
    Fixture& f = fixture();
    const BoundaryData psi{f.data(0.05)};
    const std::vector<BoundaryData> args{psi};
    CHECK(inverse_order_j(args, f.table, f.inv).values == apply_tsvd(f.inv, psi).values);
  }

  TEST_CASE("second order closed form") {
    Fixture& f = fixture();
    const BoundaryData psi{f.data(0.05)};
    const std::vector<BoundaryData> args{psi, psi};
    const Vector got = inverse_order_j(args, f.table, f.inv).values;
    // -J1+ [ -K_2(eta, eta)/K_0 + (K_1(eta)/K_0)^2 / 2 ] with eta = J1+ psi.
    const Vector eta = apply_tsvd(f.inv, psi).values;
    ForwardSeries fs(f.table);
    const Vector* one[] = {&eta};
    const Vector* two[] = {&eta, &eta};
    const Vector k0 = born_k0(f.table);
    const Vector r1 = fs.born_boundary(one).cwiseQuotient(k0);
    const Vector j2 = -fs.born_boundary(two).cwiseQuotient(k0) + 0.5 * r1.cwiseProduct(r1);
    const Vector expected = -(f.inv.pseudoinverse * j2);
    // Both sides pass through J_1^+ with cond ~ 1e11, so agreement stops near 1e-9.
    CHECK((got - expected).norm() <= 1e-8 * expected.norm());
  }

  TEST_CASE("composition counts at the top level") {
    Fixture& f = fixture();
    const BoundaryData psi{f.data(0.05)};
    InverseSeries s(f.table, f.inv);
    const std::vector<BoundaryData> three{psi, psi, psi};
    s.evaluate(three);
    CHECK(s.last_top_level_compositions() == 3);
    const BoundaryData other{f.data(0.05)};
    const std::vector<BoundaryData> four{psi, other, psi, other};
    s.evaluate(four);
    CHECK(s.last_top_level_compositions() == 7);
  }

  TEST_CASE("multilinear and degree-homogeneous") {
    Fixture& f = fixture();
    const BoundaryData a{f.data(0.05)}, b{f.data(0.05)}, c{f.data(0.05)};
    const BoundaryData bc{b.values - 2.0 * c.values};
    auto eval = [&](std::vector<BoundaryData> args) { return inverse_order_j(args, f.table, f.inv).values; };
    const Vector lhs = eval({a, bc, a});
    const Vector rhs = eval({a, b, a}) - 2.0 * eval({a, c, a});
    // Rounding in b - 2c is amplified by up to sigma_1 / sigma_23.
    const double cond = f.inv.sigma(0) / f.inv.sigma(22);
    CHECK((lhs - rhs).norm() <= 100 * 2.2e-16 * cond * lhs.norm());

    // A power of two scales without rounding, so homogeneity holds to the last bit.
    const double t = 2.0;
    const BoundaryData ta{t * a.values};
    for (int j = 1; j <= 4; ++j) {
      InverseSeries s(f.table, f.inv);
      const Vector base = s.order_term(j, a).values;
      const Vector scaled = s.order_term(j, ta).values;
      CHECK((scaled - std::pow(t, j) * base).norm() <= 1e-15 * scaled.norm());
    }
  }

  TEST_CASE("memoized and fresh evaluations agree bitwise") {
    Fixture& f = fixture();
    const BoundaryData psi{f.data(0.05)};
    InverseSeries s(f.table, f.inv);
    for (int j = 1; j <= 4; ++j) s.order_term(j, psi);
    const Vector warm = s.order_term(5, psi).values;
    const std::vector<BoundaryData> args(5, psi);
    const Vector cold = inverse_order_j(args, f.table, f.inv).values;
    CHECK(warm == cold);
  }

  TEST_CASE("zero data") {
    Fixture& f = fixture();
    const Reconstruction r = reconstruct(BoundaryData{Vector::Zero(90)}, f.table, f.inv, 4);
    for (const auto& t : r.terms) CHECK(t.values.isZero());
    CHECK((r.mu_a.values.array() == f.cfg.g()).all());
    CHECK(r.mu_a.role == ProfileRole::mu_a);
    CHECK_FALSE(r.divergence_suspected);
  }

  TEST_CASE("partial sums and mu_a") {
    Fixture& f = fixture();
    ProblemConfig c = f.cfg;
    c.eta_a = 0.2;
    const Reconstruction r = reconstruct(exact_boundary_data(c), f.table, f.inv, 3);
    REQUIRE(r.terms.size() == 3);
    CHECK(r.partial_sums[2].values.isApprox(r.terms[0].values + r.terms[1].values + r.terms[2].values, 1e-15));
    CHECK(r.mu_a.values.isApprox(c.g() * (Vector::Ones(90) + r.partial_sums[2].values), 1e-15));
    CHECK(r.term_norms[1] < r.term_norms[0]);
    CHECK_FALSE(r.divergence_suspected);
  }

  TEST_CASE("inversion of data generated by the forward series from eta_proj") {
    Fixture& f = fixture();
    ProblemConfig c = f.cfg;
    c.eta_a = 0.2;
    const RadialProfile proj = projected_truth(true_profile(c, f.grid), f.map, f.inv);
    ForwardSeries fs(f.table);
    std::vector<const Vector*> args;
    Vector psi = Vector::Zero(90);
    for (int j = 1; j <= 8; ++j) {
      args.push_back(&proj.values);
      psi += fs.rytov(args);
    }
    const Reconstruction r = reconstruct(BoundaryData{psi}, f.table, f.inv, 5);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& p : r.partial_sums) {
      const double err = (p.values - proj.values).norm() / proj.values.norm();
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-3);
  }

  TEST_CASE("errors") {
    Fixture& f = fixture();
    CHECK_THROWS_AS(reconstruct(BoundaryData{Vector::Zero(90)}, f.table, f.inv, 0), DomainError);
    InverseSeries s(f.table, f.inv);
    CHECK_THROWS_AS(s.evaluate(std::vector<BoundaryData>{}), DomainError);
    CHECK_THROWS_AS(s.evaluate(std::vector<BoundaryData>{BoundaryData{Vector::Zero(3)}}), DomainError);
    CHECK_THROWS_AS(s.order_term(0, BoundaryData{Vector::Zero(90)}), DomainError);
  }
}
