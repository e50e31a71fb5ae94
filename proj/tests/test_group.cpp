#include <doctest.h>

#include <cmath>
#include <random>

#include "htype/grid.hpp"
#include "htype/group.hpp"

using namespace htype;

TEST_CASE("Heisenberg generator is the 2x2 rotation by +90 degrees") {
  const HTypeGroup g = build_htype_group(1, 1);
  const Matrix& u = g.u(0);
  CHECK(u(0, 0) == 0.0);
  CHECK(u(1, 1) == 0.0);
  CHECK(std::abs(u(0, 1)) == 1.0);
  CHECK(u(0, 1) == -u(1, 0));
  const std::vector<double> z{1.0, 0.0}, zp{0.0, 1.0};
  // <z, U z'> = x'y - y'x
  CHECK(g.bracket(z, zp)[0] == doctest::Approx(0.0 * 0.0 - 1.0 * 1.0));
}

TEST_CASE("supported pairs pass all conditions") {
  for (auto [m, n] : {std::pair{1, 1}, {3, 2}, {7, 4}, {1, 3}, {3, 4}, {2, 2}, {5, 4}, {8, 8}}) {
    CAPTURE(m);
    CAPTURE(n);
    const HTypeVerification v = verify_htype_conditions(build_htype_group(m, n));
    CHECK(v.max_violation() <= 1e-15);
    CHECK(v.passed());
  }
}

TEST_CASE("unsupported pairs are rejected") {
  CHECK_THROWS_AS(build_htype_group(2, 1), UnsupportedDimensionPair);
  CHECK_THROWS_AS(build_htype_group(3, 1), UnsupportedDimensionPair);
  CHECK_THROWS_AS(build_htype_group(4, 2), UnsupportedDimensionPair);
}

TEST_CASE("no two anticommuting 2x2 skew orthogonal matrices exist") {
  // every 2x2 skew orthogonal matrix is +-J; J J + J J = -2 I for either sign pairing
  for (int s1 : {-1, 1}) {
    for (int s2 : {-1, 1}) {
      const Matrix a(2, 2, {0.0, -1.0 * s1, 1.0 * s1, 0.0});
      const Matrix b(2, 2, {0.0, -1.0 * s2, 1.0 * s2, 0.0});
      CHECK((a * b + b * a).max_abs() == doctest::Approx(2.0));
    }
  }
}

TEST_CASE("scaling a generator breaks orthogonality by 3") {
  const HTypeGroup g = build_htype_group(1, 1);
  const HTypeGroup bad(1, 1, {g.u(0) * 2.0});
  const HTypeVerification v = verify_htype_conditions(bad);
  CHECK(v.orthogonality == doctest::Approx(3.0));
  CHECK_FALSE(v.passed());
}

TEST_CASE("B(a) is orthogonal for unit a") {
  const HTypeGroup g = build_htype_group(7, 4);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(7);
    double r = 0.0;
    for (double& v : a) {
      v = normal(rng);
      r += v * v;
    }
    for (double& v : a) v /= std::sqrt(r);
    const Matrix b = g.b_of(a);
    worst = std::max(worst, (b.transpose() * b - Matrix::identity(8)).max_abs());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("group law") {
  const HTypeGroup g = build_htype_group(3, 2);
  const GroupPoint p{{0.3, -1.2, 0.5, 2.0}, {0.1, -0.4, 0.9}};
  const GroupPoint e{{0, 0, 0, 0}, {0, 0, 0}};
  const GroupPoint pe = g.multiply(p, e);
  CHECK(pe.z == p.z);
  CHECK(pe.t == p.t);
  const GroupPoint minus_z{{-0.3, 1.2, -0.5, -2.0}, {0, 0, 0}};
  const GroupPoint zz = g.multiply({p.z, {0, 0, 0}}, minus_z);
  for (double v : zz.z) CHECK(v == 0.0);
  for (double v : zz.t) CHECK(v == 0.0);
  const GroupPoint q = g.multiply(p, g.inverse(p));
  for (double v : q.z) CHECK(std::abs(v) <= 1e-15);
  for (double v : q.t) CHECK(std::abs(v) <= 1e-15);

  const HTypeGroup h = build_htype_group(1, 1);
  const GroupPoint r = h.multiply({{1, 0}, {0}}, {{0, 1}, {0}});
  CHECK(r.z == std::vector<double>{1, 1});
  CHECK(r.t[0] == doctest::Approx(-0.5));
}

TEST_CASE("sublaplacian of a t-independent function is -Delta_z") {
  const HTypeGroup g = build_htype_group(1, 1);
  const TensorGrid grid = group_grid(g, 64, 8.0, 16, 16.0);
  const GridField f = sample_field(grid, [](std::span<const double> x) {
    return Complex(std::exp(-(x[0] * x[0] + x[1] * x[1])));
  });
  const GridField lap = sample_field(grid, [](std::span<const double> x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return Complex((4.0 - 4.0 * r2) * std::exp(-r2));
  });
  const GridField lf = apply_operator(g, GroupOperator::sublaplacian(), f);
  const GridField tf = apply_operator(g, GroupOperator::central(), f);
  CHECK(relative_l2_error(lf, lap) <= 1e-10);
  CHECK(l2_norm(tf) <= 1e-12 * l2_norm(f));
}

TEST_CASE("Delta of e^{-i<a,t>} e^{-|a||z|^2/4} is (n|a| + |a|^2) times itself") {
  const HTypeGroup g = build_htype_group(1, 1);
  const TensorGrid grid = group_grid(g, 64, 8.0, 32, 16.0);
  const double a = 2.0 * kPi * 5.0 / 32.0;  // a t-grid frequency
  const GridField f = sample_field(grid, [a](std::span<const double> x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return std::polar(std::exp(-a * r2 / 4.0), -a * x[2]);
  });
  const GridField df = apply_operator(g, GroupOperator::full(), f);
  CHECK(relative_l2_error(df, scaled(f, a + a * a)) <= 1e-3);
}
