#include <doctest.h>

#include <cmath>

#include "htype/grid.hpp"
#include "htype/hermite.hpp"
#include "htype/laguerre.hpp"

using namespace htype;

namespace {

GridField on_grid(const PlaneFunction& f, const TensorGrid& grid) { return to_grid(f, grid).grid_field(); }

GridField as_grid(const PlaneFunction& f) {
  return f.backend() == PlaneFunction::Backend::Grid ? f.grid_field() : on_grid(f, plane_grid());
}

double rel_error(const PlaneFunction& f, const PlaneFunction& ref) {
  const TensorGrid grid = f.backend() == PlaneFunction::Backend::Grid ? f.grid_field().grid : plane_grid();
  return relative_l2_error(on_grid(f, grid), on_grid(ref, grid));
}

PlaneFunction analytic(std::function<Complex(double, double)> fn) {
  AnalyticPlane a;
  a.n = 1;
  a.value = [fn](std::span<const double> z) { return fn(z[0], z[1]); };
  return PlaneFunction::analytic(a);
}

}  // namespace

TEST_CASE("normalization fixed by phi_0 x phi_0") {
  const PlancherelNormalization& c = plancherel_normalization();
  CHECK(c.reproducing_constant == doctest::Approx(2.0 * kPi).epsilon(1e-10));
  CHECK(c.expansion_consistency == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(c.reproducing_residual <= 1e-10);
  CHECK(c.exponent_per_n == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("twisted convolution at the origin is the plain convolution") {
  const PlaneFunction f = analytic([](double x, double y) {
    return Complex(1.0, 0.3 * x) * std::exp(-((x - 0.4) * (x - 0.4) + y * y));
  });
  const PlaneFunction g = analytic([](double x, double y) {
    return Complex((1.0 + x) * std::exp(-0.5 * (x * x + (y + 0.2) * (y + 0.2))));
  });
  const TensorGrid grid = plane_grid();
  const GridField fg = on_grid(f, grid), gg = on_grid(g, grid);
  // int f(-w) g(w) dw by the trapezoid rule on the same lattice
  Complex direct = 0.0;
  const Axis& ax = grid.axis(0);
  for (int i = 0; i < ax.count; ++i) {
    for (int j = 0; j < ax.count; ++j) {
      const double w[2] = {ax.point(i), ax.point(j)};
      const double mw[2] = {-w[0], -w[1]};
      direct += f(mw) * g(w);
    }
  }
  direct *= grid.cell_volume();
  const GridField h = as_grid(twisted_convolution(f, g, 1.3));
  REQUIRE(h.grid.same_as(grid));
  const std::size_t origin = static_cast<std::size_t>(ax.count / 2) * ax.count + ax.count / 2;
  CHECK(std::abs(h.values[origin] - direct) <= 1e-10 * std::abs(direct));
}

TEST_CASE("projection onto phi_k is diagonal") {
  const double lambda = 1.0;
  const double c = 2.0 * kPi / lambda;
  for (int k = 0; k <= 3; ++k) {
    const PlaneFunction pk = PlaneFunction::laguerre(k, 1, lambda);
    for (int j = 0; j <= 3; ++j) {
      const PlaneFunction r = hermite_project(pk, j, lambda);
      const GridField rg = as_grid(r);
      const GridField ref = on_grid(pk, rg.grid);
      if (j == k) {
        CHECK(relative_l2_error(rg, scaled(ref, c)) <= 1e-8);
      } else {
        CHECK(l2_norm(rg) <= 1e-8 * c * l2_norm(ref));
      }
    }
  }
}

TEST_CASE("reconstruction of a Gaussian") {
  const PlaneFunction f = PlaneFunction::gaussian(1, 1.0);
  const Reconstruction rec = reconstruct(f, 2.0, -1);
  CHECK(rel_error(rec.partial_sum, f) <= 1e-6);
  for (std::size_t k = 1; k < rec.tail.size(); ++k) CHECK(rec.tail[k] <= rec.tail[k - 1] + 1e-15);
}

TEST_CASE("single-term and orthogonal reconstructions") {
  const double lambda = 1.5;
  const PlaneFunction p0 = PlaneFunction::laguerre(0, 1, lambda);
  CHECK(rel_error(reconstruct(p0, lambda, 0).partial_sum, p0) <= 1e-8);
  const PlaneFunction p3 = PlaneFunction::laguerre(3, 1, lambda);
  const Reconstruction r2 = reconstruct(p3, lambda, 2);
  CHECK(l2_norm(as_grid(r2.partial_sum)) <= 1e-8 * std::sqrt(l2_norm2(p3)));
  CHECK(rel_error(reconstruct(p3, lambda, 3).partial_sum, p3) <= 1e-8);
}

TEST_CASE("Plancherel") {
  const PlancherelReport p0 = plancherel_check(PlaneFunction::laguerre(0, 1, 1.0), 1.0, 0);
  CHECK(p0.lhs == doctest::Approx(2.0 * kPi).epsilon(1e-10));
  CHECK(p0.gap <= 1e-10);
  for (double lambda : {1.0, 2.0}) {
    const PlancherelReport g = plancherel_check(PlaneFunction::gaussian(1, 1.0), lambda, -1);
    CHECK(g.gap <= 1e-6);
  }
}

TEST_CASE("radial expansion coefficients reproduce the closed form") {
  const PlaneFunction f = PlaneFunction::gaussian(2, 0.3);
  const RadialExpansion e = radial_expansion(f.closed_form(), 1.0, 200, 1e-28);
  for (double r : {0.0, 0.5, 1.7, 3.0}) CHECK(std::abs(e.value(r) - std::exp(-0.3 * r * r)) <= 1e-10);
}

TEST_CASE("twisted Laplacian eigenvalues") {
  const double lambda = 1.0;
  const TensorGrid wide = plane_grid(160, 12.0);
  for (int k = 0; k <= 5; ++k) {
    const PlaneFunction pk = PlaneFunction::laguerre(k, 1, lambda);
    const GridField lg = as_grid(twisted_laplacian_apply(to_grid(pk, wide), lambda));
    CHECK(relative_l2_error(lg, scaled(on_grid(pk, lg.grid), (2.0 * k + 1.0) * lambda)) <= 1e-3);
  }
  const GridField radial = on_grid(PlaneFunction::gaussian(1, 0.5), plane_grid());
  CHECK(l2_norm(angular_term(radial, lambda)) <= 1e-8 * l2_norm(radial));

  const PlaneFunction wrong = PlaneFunction::laguerre(0, 1, 2.0 * lambda);
  const GridField lw = as_grid(twisted_laplacian_apply(to_grid(wrong, plane_grid()), lambda, 1e-4));
  const GridField w = on_grid(wrong, lw.grid);
  const Complex ray = inner_product(w, lw) / inner_product(w, w);
  CHECK(relative_l2_error(lw, scaled(w, ray)) >= 0.1);
}

TEST_CASE("dilation law of the projection ratio") {
  const AnalyticPlane f = PlaneFunction::gaussian(1, 0.5).closed_form();
  CHECK(projection_scaling_probe(f, 0, 1.0, 1.0).observed == doctest::Approx(1.0).epsilon(1e-12));
  const ScalingReport r4 = projection_scaling_probe(f, 0, 4.0, 1.0);
  CHECK(r4.expected == doctest::Approx(0.5));
  CHECK(r4.relative_error <= 1e-6);
  CHECK_THROWS_AS(projection_scaling_probe(f, 0, 9.0, 1.2), ExponentOutOfRange);
  ScalingOptions allow;
  allow.allow_outside_range = true;
  const ScalingReport r9 = projection_scaling_probe(f, 0, 9.0, 1.2, allow);
  CHECK_FALSE(r9.in_estimate_range);
  CHECK(r9.expected == doctest::Approx(std::pow(9.0, -2.0 / 3.0)));
  CHECK(r9.relative_error <= 1e-6);
}
