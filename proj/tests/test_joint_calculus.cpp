#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "htype/grid.hpp"
#include "htype/group_function.hpp"
#include "htype/joint_calculus.hpp"
#include "htype/laguerre.hpp"
#include "htype/sharpness.hpp"

using namespace htype;

namespace {

const HTypeGroup& heisenberg() {
  static const HTypeGroup g = build_htype_group(1, 1);
  return g;
}

GroupFunction grid_function(const std::function<Complex(double, double, double)>& fn,
                            int z_count = 64, int t_count = 64, double z_half = 8.0) {
  const TensorGrid grid = group_grid(heisenberg(), z_count, z_half, t_count, 16.0);
  return GroupFunction::grid(1, 1, sample_field(grid, [&](std::span<const double> x) { return fn(x[0], x[1], x[2]); }));
}

double g_of(double x, double y) { return (1.0 + 0.5 * x) * std::exp(-(x * x + y * y) / 2.0); }

SampleLayout small_layout() {
  SampleLayout l;
  for (int i = 0; i <= 12; ++i) l.radii.push_back(0.5 * i);
  for (int j = -2; j <= 2; ++j) l.t_points.push_back(1.1 * j);
  return l;
}

// f^a = psi(|a|) phi_0^{|a|}(z): joint spectrum k = 0, |a| in supp psi
SpectralGroupFunction narrow_eigen_packet(const BumpKnots& knots) {
  SpectralGroupFunction s;
  s.n = 1;
  s.m = 1;
  s.amplitude = [knots](std::span<const double> a) { return Complex(bump(knots, std::abs(a[0]))); };
  s.profile = [](double rho, double r) { return laguerre_function(0, 1, rho, r * r); };
  s.z_radius = [](double rho) { return std::sqrt(160.0 / rho); };
  s.a_min = knots.a;
  s.a_max = knots.d;
  return s;
}

}  // namespace

TEST_CASE("central Fourier transform of a t-Gaussian") {
  const GroupFunction f = grid_function([](double x, double y, double t) { return Complex(g_of(x, y) * std::exp(-t * t / 2)); });
  for (double a : {0.0, 0.37, 1.3}) {
    const double av[1] = {a};
    const GridField fa = central_fourier(f, av).grid_field();
    const GridField ref = sample_field(fa.grid, [a](std::span<const double> z) {
      return Complex(g_of(z[0], z[1]) * std::sqrt(2 * kPi) * std::exp(-a * a / 2));
    });
    CHECK(relative_l2_error(fa, ref) <= 1e-8);
    double imag = 0.0;
    for (const Complex& v : fa.values) imag = std::max(imag, std::abs(v.imag()));
    CHECK(imag <= 1e-10);
  }
}

TEST_CASE("modulation moves the central spectrum") {
  const double a0 = 1.2;
  const GroupFunction f = grid_function([a0](double x, double y, double t) {
    return g_of(x, y) * std::polar(std::exp(-t * t / 50.0), -a0 * t);
  });
  auto mass = [&](double a) {
    const double av[1] = {a};
    return l2_norm(central_fourier(f, av).grid_field());
  };
  CHECK(mass(a0) > mass(a0 - 0.3));
  CHECK(mass(a0) > mass(a0 + 0.3));
  CHECK(mass(a0) > 10.0 * mass(0.0));
}

TEST_CASE("convolution with a joint eigenfunction diagonalizes L and T") {
  const GroupFunction f = grid_function([](double x, double y, double t) {
    return Complex(std::exp(-(x * x + y * y) / 4 - t * t / 2));
  }, 96, 64, 12.0);
  const double a = 2.0 * kPi * 6.0 / 32.0;  // t-grid frequency
  const double av[1] = {a};
  for (int k = 0; k <= 3; ++k) {
    const GroupFunction out = joint_eigenfunction_convolve(heisenberg(), f, k, av);
    const GridField& u = out.grid_field();
    const GridField tu = apply_operator(heisenberg(), GroupOperator::central(), u, 1e-3);
    const GridField lu = apply_operator(heisenberg(), GroupOperator::sublaplacian(), u, 1e-3);
    CHECK(relative_l2_error(tu, scaled(u, a * a)) <= 1e-3);
    CHECK(relative_l2_error(lu, scaled(u, (2.0 * k + 1.0) * a)) <= 1e-3);
  }
}

TEST_CASE("restriction is linear") {
  auto f_fn = [](double x, double y, double t) { return Complex(std::exp(-(x * x + y * y) / 4 - t * t / 2)); };
  auto g_fn = [](double x, double y, double t) {
    return std::polar(std::exp(-((x - 0.5) * (x - 0.5) + y * y) / 3 - t * t / 4), 0.7 * t);
  };
  const Complex alpha = 2.0, beta(0.0, -1.5);
  const GroupFunction f = grid_function(f_fn, 32, 32);
  const GroupFunction g = grid_function(g_fn, 32, 32);
  const GroupFunction fg = grid_function([&](double x, double y, double t) {
    return alpha * f_fn(x, y, t) + beta * g_fn(x, y, t);
  }, 32, 32);
  const SpectralProfile h = SpectralProfile::sum(1, 1);
  RestrictionOptions ro;
  ro.max_k = 40;
  // high-k kernels at small lambda reach the frame; linearity holds regardless
  ro.convolution.truncation_tolerance = 1.0;
  const double mu = 3.0;
  const GroupValues pf = restriction_apply(heisenberg(), h, f, mu, {}, ro).values;
  const GroupValues pg = restriction_apply(heisenberg(), h, g, mu, {}, ro).values;
  const GroupValues pfg = restriction_apply(heisenberg(), h, fg, mu, {}, ro).values;
  GroupValues combo = pf.zeros_like();
  combo.axpy(alpha, pf);
  combo.axpy(beta, pg);
  CHECK(pfg.norm() > 0.0);
  CHECK(relative_error(pfg, combo) <= 1e-12);
}

TEST_CASE("a narrow eigen packet projects only near its spectral value") {
  const GroupFunction f = GroupFunction::spectral(narrow_eigen_packet({0.8, 0.9, 1.1, 1.2}));
  const SampleLayout layout = small_layout();
  const SpectralProfile h = SpectralProfile::delta();  // k = 0: mu = lambda + lambda^2
  const double peak = restriction_apply(heisenberg(), h, f, 2.0, layout).values.norm();
  CHECK(peak > 0.0);
  for (double mu : {0.3, 0.9, 4.0, 9.0}) {
    CHECK(restriction_apply(heisenberg(), h, f, mu, layout).values.norm() <= 1e-6 * peak);
  }
}

TEST_CASE("zero central spectrum at the sampled |a| gives zero") {
  const GroupFunction f = GroupFunction::spectral(narrow_eigen_packet({3.0, 3.5, 4.0, 4.5}));
  const GroupValues p = restriction_apply(heisenberg(), SpectralProfile::delta(), f, 2.0, small_layout()).values;
  CHECK(p.norm() == 0.0);
}

TEST_CASE("bounded calculus and inversion on a Gaussian") {
  const GroupFunction f = GroupFunction::spectral(gaussian_group_function(1, 1));
  SampleLayout layout;
  for (int i = 0; i <= 32; ++i) layout.radii.push_back(0.25 * i);
  for (int j = -16; j <= 16; ++j) layout.t_points.push_back(0.5 * j);
  CalculusOptions co;
  co.intervals = 128;
  const CalculusTable table = restriction_table(heisenberg(), SpectralProfile::delta(), f, layout, co);
  const GroupValues input = sample_input(f, layout);

  CHECK(integrate_symbol(table, [](double) { return 0.0; }).norm() == 0.0);
  // the mu-integrand oscillates like e^{i lambda(mu) t}: measure on |t| <= 4
  const GroupSamples& in = input.samples;
  const GroupSamples out = integrate_symbol(table, [](double) { return 1.0; }).samples;
  const std::vector<double> w = radial_weights(in);
  double diff = 0.0, size = 0.0;
  for (std::size_t i = 0; i < in.radii.size(); ++i) {
    for (std::size_t j = 0; j < in.t_count(); ++j) {
      if (std::abs(in.t_point(j)[0]) > 4.0) continue;
      diff += w[i] * std::norm(out.at(i, j) - in.at(i, j));
      size += w[i] * std::norm(in.at(i, j));
    }
  }
  const double inv = std::sqrt(diff / size);
  MESSAGE("inversion error on |t| <= 4: " << inv);
  CHECK(inv <= 1e-2);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0), cut(std::log(table.mu_lo), std::log(table.mu_hi));
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> edges{cut(rng), cut(rng), cut(rng)};
    std::sort(edges.begin(), edges.end());
    const std::vector<double> level{u(rng), u(rng), u(rng), u(rng)};
    double sup = 0.0;
    for (double v : level) sup = std::max(sup, std::abs(v));
    auto H = [&](double mu) {
      const double x = std::log(mu);
      std::size_t i = 0;
      while (i < edges.size() && x > edges[i]) ++i;
      return level[i];
    };
    const double ratio = integrate_symbol(table, H).norm() / (sup * input.norm());
    worst = std::max(worst, ratio);
  }
  MESSAGE("largest ||H f|| / (sup|H| ||f||) over 20 symbols: " << worst);
  CHECK(worst <= 1.0 + 1e-2);
}
