#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rytov/errors.hpp"
#include "rytov/forward.hpp"
#include "rytov/greens.hpp"
#include "rytov/series.hpp"

using namespace rytov;

namespace {

struct Fixture {
  ProblemConfig cfg;
  RadialGrid grid = make_grid(cfg);
  GreensTable table = build_greens_table(cfg, grid);
  std::mt19937_64 rng{20240611};

  RadialProfile random_profile(double scale = 0.1) {
    std::uniform_real_distribution<double> u(-scale, scale);
    RadialProfile p{Vector(grid.size())};
    for (Eigen::Index i = 0; i < p.values.size(); ++i) p.values(i) = u(rng);
    return p;
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

double max_rel(const Vector& a, const Vector& b) {
  return ((a - b).cwiseAbs().array() / b.cwiseAbs().array().max(1e-300)).maxCoeff();
}

}  // namespace

TEST_SUITE("compositions") {
  TEST_CASE("small enumerations") {
    CHECK(compositions(3, 2) == std::vector<Composition>{{1, 2}, {2, 1}});
    for (int j = 1; j <= 9; ++j) CHECK(compositions(j, 1) == std::vector<Composition>{{j}});
    CHECK(compositions(4, 4) == std::vector<Composition>{{1, 1, 1, 1}});
    CHECK(compositions(4, 3) == std::vector<Composition>{{1, 1, 2}, {1, 2, 1}, {2, 1, 1}});
    CHECK(compositions(2, 3).empty());
    CHECK(compositions(0, 1).empty());
    CHECK(compositions(3, 0).empty());
  }

  TEST_CASE("counts are binomial and totals are powers of two") {
    for (int j = 1; j <= 16; ++j) {
      std::uint64_t total = 0;
      for (int m = 1; m <= j; ++m) {
        const auto comps = compositions(j, m);
        CHECK(comps.size() == binomial(j - 1, m - 1));
        for (const Composition& c : comps) {
          int sum = 0;
          for (int p : c) {
            CHECK(p >= 1);
            sum += p;
          }
          CHECK(sum == j);
        }
        CHECK(std::is_sorted(comps.begin(), comps.end()));
        total += comps.size();
      }
      CHECK(total == (std::uint64_t{1} << (j - 1)));
    }
    std::uint64_t ten = 0;
    for (int m = 1; m <= 10; ++m) ten += compositions(10, m).size();
    CHECK(ten == 512);
  }
}

TEST_SUITE("series") {
  TEST_CASE("K_0 and layout") {
    Fixture& f = fixture();
    const Vector k0 = born_k0(f.table);
    for (int a = 0; a < 90; ++a) CHECK(k0(a) == -f.table.mode(a).boundary);
    const BornVector k = born_vector(1, std::vector<RadialProfile>{f.random_profile()}, f.table);
    CHECK(k.values.size() == 90 * 90);
    CHECK(k.order == 1);
    const Vector slice = boundary_slice(k, f.table);
    for (int a = 0; a < 90; a += 11) CHECK(slice(a) == k.values(a * 90 + 89));
  }

  TEST_CASE("zero input gives the zero Born vector") {
    Fixture& f = fixture();
    const RadialProfile zero{Vector::Zero(90)};
    CHECK(born_vector(1, std::vector<RadialProfile>{zero}, f.table).values.isZero());
  }

  TEST_CASE("unit impulse boundary entry") {
    Fixture& f = fixture();
    const int n0 = 30;
    RadialProfile e{Vector::Zero(90)};
    e.values(n0) = 1.0;
    const Vector slice = boundary_slice(born_vector(1, std::vector<RadialProfile>{e}, f.table), f.table);
    const double w = f.cfg.g() * f.grid.spacing();
    for (int a = 0; a < 90; a += 7) {
      const ModeKernel& m = f.table.mode(a);
      CHECK(slice(a) == doctest::Approx(w * m.boundary_row(n0) * m.boundary_col(n0)).epsilon(1e-14));
    }
  }

  TEST_CASE("multilinearity of K_j and J_j") {
    Fixture& f = fixture();
    for (int j = 1; j <= 4; ++j) {
      for (int slot = 0; slot < j; ++slot) {
        std::vector<RadialProfile> base;
        for (int s = 0; s < j; ++s) base.push_back(f.random_profile());
        const RadialProfile p1 = f.random_profile(), p2 = f.random_profile();
        const double t = -1.7;
        auto with = [&](const Vector& v) {
          auto args = base;
          args[static_cast<std::size_t>(slot)].values = v;
          return args;
        };
        const Vector k1 = born_vector(j, with(p1.values), f.table).values;
        const Vector k2 = born_vector(j, with(p2.values), f.table).values;
        const Vector k12 = born_vector(j, with(p1.values + t * p2.values), f.table).values;
        CHECK((k12 - (k1 + t * k2)).cwiseAbs().maxCoeff() <= 1e-12 * k12.cwiseAbs().maxCoeff());

        const Vector r1 = rytov_forward(j, with(p1.values), f.table);
        const Vector r2 = rytov_forward(j, with(p2.values), f.table);
        const Vector r12 = rytov_forward(j, with(p1.values + t * p2.values), f.table);
        CHECK((r12 - (r1 + t * r2)).cwiseAbs().maxCoeff() <= 1e-12 * r12.cwiseAbs().maxCoeff());
      }
    }
  }

  TEST_CASE("degree scaling") {
    Fixture& f = fixture();
    const RadialProfile p = f.random_profile();
    const double t = 0.37;
    const RadialProfile tp{t * p.values};
    for (int j = 1; j <= 5; ++j) {
      const std::vector<RadialProfile> a(static_cast<std::size_t>(j), p), b(static_cast<std::size_t>(j), tp);
      CHECK(max_rel(rytov_forward(j, b, f.table), std::pow(t, j) * rytov_forward(j, a, f.table)) <= 1e-12);
    }
  }

  TEST_CASE("Born to Rytov identities on shared K-vectors") {
    Fixture& f = fixture();
    const RadialProfile eta = f.random_profile(0.5);
    ForwardSeries fs(f.table);
    const Vector* one[] = {&eta.values};
    const Vector* two[] = {&eta.values, &eta.values};
    const Vector u0 = -born_k0(f.table);
    const Vector u1 = -fs.born_boundary(one);
    const Vector u2 = -fs.born_boundary(two);
    const Vector psi1 = fs.rytov(one), psi2 = fs.rytov(two);
    const Vector r1 = u1.cwiseQuotient(u0);
    CHECK(max_rel(psi1, -r1) <= 1e-13);
    CHECK(max_rel(psi2, -u2.cwiseQuotient(u0) + 0.5 * r1.cwiseProduct(r1)) <= 1e-13);
  }

  TEST_CASE("slot order is preserved for asymmetric arguments") {
    Fixture& f = fixture();
    const RadialProfile a = f.random_profile(), b = f.random_profile(), c = f.random_profile();
    // With one detector on the boundary J_2 is symmetric, and J_3 only under reversal.
    const Vector ab = rytov_forward(2, std::vector<RadialProfile>{a, b}, f.table);
    const Vector ba = rytov_forward(2, std::vector<RadialProfile>{b, a}, f.table);
    CHECK(max_rel(ab, ba) <= 1e-12);
    const Vector abc = rytov_forward(3, std::vector<RadialProfile>{a, b, c}, f.table);
    const Vector cba = rytov_forward(3, std::vector<RadialProfile>{c, b, a}, f.table);
    const Vector bac = rytov_forward(3, std::vector<RadialProfile>{b, a, c}, f.table);
    CHECK(max_rel(abc, cba) <= 1e-12);
    CHECK((abc - bac).cwiseAbs().maxCoeff() > 1e-6 * abc.cwiseAbs().maxCoeff());
  }

  TEST_CASE("series sums to the direct solve of the discrete model") {
    Fixture& f = fixture();
    ProblemConfig c = f.cfg;
    c.eta_a = 0.2;
    const RadialProfile eta = true_profile(c, f.grid);
    const Vector exact = discrete_boundary_data(eta, f.table);
    ForwardSeries fs(f.table);
    std::vector<const Vector*> args;
    Vector sum = Vector::Zero(90);
    for (int j = 1; j <= 12; ++j) {
      args.push_back(&eta.values);
      sum += fs.rytov(args);
    }
    CHECK(max_rel(sum, exact) <= 1e-13);
    CHECK(discrete_boundary_data(RadialProfile{Vector::Zero(90)}, f.table).isZero());
  }

  TEST_CASE("truncation error decays geometrically at eta_a = 0.05") {
    Fixture& f = fixture();
    ProblemConfig c = f.cfg;
    c.eta_a = 0.05;
    const RadialProfile eta = true_profile(c, f.grid);
    const Vector exact = discrete_boundary_data(eta, f.table);
    ForwardSeries fs(f.table);
    std::vector<const Vector*> args;
    Vector sum = Vector::Zero(90), prev;
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n) {
      args.push_back(&eta.values);
      sum += fs.rytov(args);
      const Vector err = (sum - exact).cwiseAbs();
      if (n > 1) {
        for (int a = 0; a < 90; ++a) {
          if (prev(a) > 1e-14 * std::abs(exact(a))) worst = std::max(worst, err(a) / prev(a));
        }
      }
      prev = err;
    }
    CHECK(worst < 0.1);
  }

  TEST_CASE("caching by argument identity") {
    Fixture& f = fixture();
    const RadialProfile p = f.random_profile();
    ForwardSeries fs(f.table);
    const Vector* three[] = {&p.values, &p.values, &p.values};
    fs.rytov(three);
    const std::size_t applications = fs.kernel_applications();
    CHECK(fs.cache_size() == 3);  // prefixes of length 1, 2, 3 share one key each
    fs.rytov(three);
    CHECK(fs.kernel_applications() == applications);
    fs.clear_cache();
    CHECK(fs.cache_size() == 0);
  }

  TEST_CASE("errors") {
    Fixture& f = fixture();
    const RadialProfile shortp{Vector::Zero(10)};
    CHECK_THROWS_AS(born_vector(1, std::vector<RadialProfile>{shortp}, f.table), DomainError);
    CHECK_THROWS_AS(born_vector(2, std::vector<RadialProfile>{f.random_profile()}, f.table), DomainError);
    CHECK_THROWS_AS(rytov_forward(0, std::vector<RadialProfile>{}, f.table), DomainError);
    CHECK_THROWS_AS(discrete_boundary_data(shortp, f.table), DomainError);
  }
}
