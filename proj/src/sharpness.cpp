#include "htype/sharpness.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "htype/common.hpp"
#include "htype/group.hpp"
#include "htype/profile.hpp"
#include "htype/quadrature.hpp"
#include "htype/sphere.hpp"

namespace htype {

namespace {

double mollifier(double y) { return std::abs(y) < 1.0 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0; }

// Gauss-Legendre on [0, 1] with panels halving toward 0, where the
// mollifier is flat.
QuadratureRule graded_unit_rule() {
  QuadratureRule out;
  double hi = 1.0;
  for (int level = 0; level < 4; ++level) {
    const double lo = level == 3 ? 0.0 : hi / 2.0;
    const QuadratureRule g = gauss_legendre(20, lo, hi);
    out.nodes.insert(out.nodes.end(), g.nodes.begin(), g.nodes.end());
    out.weights.insert(out.weights.end(), g.weights.begin(), g.weights.end());
    hi = lo;
  }
  return out;
}

// int_{-1}^{x} mollifier, x <= 0 except for the total
double mollifier_integral(double x) {
  static const QuadratureRule unit = graded_unit_rule();
  const double len = x + 1.0;
  CompensatedSum<double> s;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    s.add(unit.weights[i] * len * mollifier(-1.0 + unit.nodes[i] * len));
  }
  return s.value();
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

BumpKnots default_knots(int n) { return {n / 4.0, n / 2.0, 2.0 * n, 4.0 * n}; }

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  static const double total = 2.0 * mollifier_integral(0.0);
  if (u > 0.5) return 1.0 - mollifier_integral(1.0 - 2.0 * u) / total;
  return mollifier_integral(2.0 * u - 1.0) / total;
}

double bump(const BumpKnots& k, double x) {
  if (x <= k.a || x >= k.d) return 0.0;
  if (x < k.b) return smooth_step((x - k.a) / (k.b - k.a));
  if (x <= k.c) return 1.0;
  return smooth_step((k.d - x) / (k.d - k.c));
}

GaussianSeed random_gaussian_seed(int m, std::uint64_t seed) {
  if (m < 1) throw DomainError("m must be >= 1");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  GaussianSeed h;
  h.sigma = 0.7 + 0.6 * uniform();
  h.center.resize(m);
  for (double& c : h.center) c = -1.0 + 2.0 * uniform();
  return h;
}

double gaussian_value(const GaussianSeed& h, std::span<const double> s) {
  if (static_cast<int>(s.size()) != h.dim()) throw ShapeMismatch("point has the wrong dimension");
  double d2 = 0.0;
  for (int i = 0; i < h.dim(); ++i) d2 += (s[i] - h.center[i]) * (s[i] - h.center[i]);
  return h.amplitude * std::exp(-d2 / (2.0 * h.sigma * h.sigma));
}

Complex gaussian_hat(const GaussianSeed& h, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != h.dim()) throw ShapeMismatch("point has the wrong dimension");
  const double s2 = h.sigma * h.sigma;
  double phase = 0.0;
  for (int i = 0; i < h.dim(); ++i) phase += xi[i] * h.center[i];
  const double mag =
      h.amplitude * std::pow(2.0 * kPi * s2, 0.5 * h.dim()) * std::exp(-0.5 * s2 * norm2(xi));
  return std::polar(mag, phase);
}

double gaussian_lp_norm(const GaussianSeed& h, double p) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  return std::abs(h.amplitude) *
         std::pow(2.0 * kPi * h.sigma * h.sigma / p, h.dim() / (2.0 * p));
}

double sphere_fourier_kernel(int m, double x) {
  if (m < 1) throw DomainError("m must be >= 1");
  x = std::abs(x);
  if (m == 1) return 2.0 * std::cos(x);
  if (x < 1e-8) return sphere_area(m);
  if (m == 3) return 4.0 * kPi * std::sin(x) / x;
  const double nu = 0.5 * m - 1.0;
  return std::pow(2.0 * kPi, 0.5 * m) * std::pow(x, -nu) * std::cyl_bessel_j(nu, x);
}

std::vector<Complex> sphere_measure_convolve(
    const std::function<Complex(std::span<const double>)>& h_hat, int m, double r,
    const std::vector<double>& t_points, int sphere_resolution, std::uint64_t seed,
    double tolerance) {
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  if (m < 1 || t_points.size() % m != 0) throw ShapeMismatch("t points do not match m");
  const std::size_t count = t_points.size() / m;
  auto apply = [&](const SphereRule& rule) {
    std::vector<Complex> hv(rule.size());
    std::vector<double> xi(m);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      for (int i = 0; i < m; ++i) xi[i] = r * rule.node(q)[i];
      hv[q] = rule.weights[q] * h_hat(xi);
    }
    std::vector<Complex> out(count);
    const double jac = std::pow(r, m - 1);
    parallel_for(count, [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) {
        CompensatedSum<Complex> s;
        for (std::size_t q = 0; q < rule.size(); ++q) {
          double dot = 0.0;
          for (int i = 0; i < m; ++i) dot += rule.node(q)[i] * t_points[j * m + i];
          s.add(hv[q] * std::polar(1.0, -r * dot));
        }
        out[j] = jac * s.value();
      }
    });
    return out;
  };
  const SphereRule coarse = sphere_rule(m, sphere_resolution, seed);
  const std::vector<Complex> a = apply(coarse);
  const std::vector<Complex> b = apply(refine(coarse));
  double diff = 0.0, size = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    diff += std::norm(a[j] - b[j]);
    size += std::norm(b[j]);
  }
  const double residual = size > 0.0 ? std::sqrt(diff / size) : std::sqrt(diff);
  if (residual > tolerance) {
    throw QuadratureError("sphere rule changes h * dsigma^ by " + std::to_string(residual) +
                          " under node doubling");
  }
  return b;
}

Complex gaussian_sphere_convolution(const GaussianSeed& h, double r, std::span<const double> t) {
  if (static_cast<int>(t.size()) != h.dim()) throw ShapeMismatch("point has the wrong dimension");
  const int m = h.dim();
  double d2 = 0.0;
  for (int i = 0; i < m; ++i) d2 += (t[i] - h.center[i]) * (t[i] - h.center[i]);
  const double s2 = h.sigma * h.sigma;
  return h.amplitude * std::pow(r, m - 1) * std::pow(2.0 * kPi * s2, 0.5 * m) *
         std::exp(-0.5 * s2 * r * r) * sphere_fourier_kernel(m, r * std::sqrt(d2));
}

SharpnessInstance build_sharpness_instance(int n, int m, const BumpKnots& knots,
                                           const GaussianSeed& h) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (m < 2) throw DomainError("the sharpness construction needs m >= 2");
  if (h.dim() != m) throw ShapeMismatch("seed dimension differs from m");
  if (!(knots.a > 0.0 && knots.a < knots.b && knots.b <= knots.c && knots.c < knots.d)) {
    throw DomainError("bump knots must satisfy 0 < a < b <= c < d");
  }
  SharpnessInstance inst{n, m, knots, h, {}, {}};
  const double scale = std::pow(2.0 * kPi, m);
  auto profile = [](double rho, double r) { return std::exp(-0.25 * rho * r * r); };
  // e^{-rho r^2/4} < e^{-40} beyond this radius
  auto radius = [](double rho) { return std::sqrt(160.0 / rho); };
  for (int pass = 0; pass < 2; ++pass) {
    SpectralGroupFunction s;
    s.n = n;
    s.m = m;
    s.profile = profile;
    s.z_radius = radius;
    s.a_min = knots.a;
    s.a_max = knots.d;
    if (pass == 0) {
      s.amplitude = [knots, h, scale, n](std::span<const double> a) {
        const double rho = std::sqrt(norm2(a));
        return scale * bump(knots, rho) * std::pow(rho, n) * gaussian_hat(h, a);
      };
      s.label = "sharpness f";
      inst.f = std::move(s);
    } else {
      s.amplitude = [knots, scale, n](std::span<const double> a) {
        const double rho = std::sqrt(norm2(a));
        return Complex(scale * bump(knots, rho) * std::pow(rho, n));
      };
      s.label = "sharpness g";
      inst.g = std::move(s);
    }
  }
  return inst;
}

TableSpec TableSpec::doubled() const {
  TableSpec d = *this;
  d.r_panels *= 2;
  d.tau_panels *= 2;
  d.rho_panel_phase *= 0.5;
  return d;
}

namespace {

// rho-weight of the radial integrand, without the kernel
double radial_weight(const SharpnessInstance& inst, bool with_seed, double rho, double r) {
  double w = bump(inst.knots, rho) * std::pow(rho, inst.n + inst.m - 1) * std::exp(-0.25 * rho * r * r);
  if (with_seed) {
    const double s2 = inst.h.sigma * inst.h.sigma;
    w *= inst.h.amplitude * std::pow(2.0 * kPi * s2, 0.5 * inst.m) * std::exp(-0.5 * s2 * rho * rho);
  }
  return w;
}

}  // namespace

RadialTable sharpness_table(const SharpnessInstance& inst, bool with_seed, const TableSpec& spec) {
  const BumpKnots& k = inst.knots;
  if (spec.tau_max / spec.tau_panels * k.d > 4.0 + 1e-12) {
    throw GridTooCoarse("tau panels of width " + std::to_string(spec.tau_max / spec.tau_panels) +
                        " do not resolve e^{-i<a,t>} for |a| up to " + std::to_string(k.d));
  }
  RadialTable t;
  t.n = inst.n;
  t.m = inst.m;
  const QuadratureRule rr = composite_gauss_legendre(0.0, spec.r_max, spec.r_panels, spec.order);
  const QuadratureRule tr = composite_gauss_legendre(0.0, spec.tau_max, spec.tau_panels, spec.order);
  const int rho_panels =
      std::max(4, static_cast<int>(std::ceil((k.d - k.a) * spec.tau_max / spec.rho_panel_phase)));
  const QuadratureRule pr = composite_gauss_legendre(k.a, k.d, rho_panels, spec.order);
  t.r = rr.nodes;
  t.tau = tr.nodes;
  t.tau_order = spec.order;
  t.tau_max = spec.tau_max;
  for (std::size_t i = 0; i < rr.size(); ++i) {
    t.r_weights.push_back(rr.weights[i] * sphere_area(2 * inst.n) * std::pow(rr.nodes[i], 2 * inst.n - 1));
  }
  for (std::size_t j = 0; j < tr.size(); ++j) {
    t.tau_weights.push_back(tr.weights[j] * sphere_area(inst.m) * std::pow(tr.nodes[j], inst.m - 1));
  }
  const std::size_t nt = tr.size(), np = pr.size();
  std::vector<double> kernel(np * nt);
  parallel_for(np, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q)
      for (std::size_t j = 0; j < nt; ++j)
        kernel[q * nt + j] = sphere_fourier_kernel(inst.m, pr.nodes[q] * tr.nodes[j]);
  });
  t.values.assign(rr.size() * nt, 0.0);
  parallel_for(rr.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* row = t.values.data() + i * nt;
      std::vector<double> w(np);
      double w_max = 0.0;
      for (std::size_t q = 0; q < np; ++q) {
        w[q] = pr.weights[q] * radial_weight(inst, with_seed, pr.nodes[q], rr.nodes[i]);
        w_max = std::max(w_max, std::abs(w[q]));
      }
      for (std::size_t q = 0; q < np; ++q) {
        if (std::abs(w[q]) <= 1e-17 * w_max) continue;
        const double* kq = kernel.data() + q * nt;
        for (std::size_t j = 0; j < nt; ++j) row[j] += w[q] * kq[j];
      }
    }
  });
  return t;
}

double sharpness_radial_value(const SharpnessInstance& inst, bool with_seed, double r, double tau,
                              int rho_panels) {
  using boost::math::quadrature::gauss_kronrod;
  const BumpKnots& k = inst.knots;
  auto integrand = [&](double rho) {
    return radial_weight(inst, with_seed, rho, r) * sphere_fourier_kernel(inst.m, rho * tau);
  };
  // adaptive Gauss-Kronrod on equal pieces of each bump section
  const int pieces = std::max(1, rho_panels / 16);
  const double cuts[] = {k.a, k.b, k.c, k.d};
  std::vector<std::array<double, 3>> parts;  // a, b, one-rule estimate
  double l1 = 0.0;
  for (int sec = 0; sec < 3; ++sec) {
    const double lo = cuts[sec], hi = cuts[sec + 1];
    if (!(hi > lo)) continue;
    for (int p = 0; p < pieces; ++p) {
      const double a = lo + (hi - lo) * p / pieces;
      const double b = lo + (hi - lo) * (p + 1) / pieces;
      double piece_l1 = 0.0;
      const double est = gauss_kronrod<double, 61>::integrate(integrand, a, b, 0, 0.0, nullptr, &piece_l1);
      l1 += piece_l1;
      parts.push_back({a, b, est});
    }
  }
  // pieces of an oscillating integrand cancel; aim at 1e-14 of its L1 norm
  CompensatedSum<double> s;
  for (const auto& [a, b, est] : parts) {
    const double tol = std::clamp(1e-14 * l1 / std::max(std::abs(est), 1e-300), 1e-14, 1e-2);
    s.add(gauss_kronrod<double, 61>::integrate(integrand, a, b, 15, tol));
  }
  return s.value();
}

namespace {

// Legendre P_0..P_{count-1} at x.
void legendre_values(double x, int count, double* out) {
  out[0] = 1.0;
  if (count > 1) out[1] = x;
  for (int k = 1; k + 1 < count; ++k) out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1);
}

// int_{-1}^{1} |p| for the degree order-1 interpolant of v at the
// Gauss-Legendre nodes, split at the sign changes of p.
double abs_integral_panel(const double* v, const QuadratureRule& gl) {
  const int order = static_cast<int>(gl.size());
  std::vector<double> c(order, 0.0), pk(order + 1);
  for (int i = 0; i < order; ++i) {
    legendre_values(gl.nodes[i], order, pk.data());
    for (int k = 0; k < order; ++k) c[k] += 0.5 * (2 * k + 1) * gl.weights[i] * pk[k] * v[i];
  }
  auto value = [&](double x) {
    legendre_values(x, order, pk.data());
    double s = 0.0;
    for (int k = 0; k < order; ++k) s += c[k] * pk[k];
    return s;
  };
  // int_{-1}^x P_k = (P_{k+1} - P_{k-1}) / (2k+1), k >= 1
  auto antiderivative = [&](double x) {
    legendre_values(x, order + 1, pk.data());
    double s = c[0] * (x + 1.0);
    for (int k = 1; k < order; ++k) s += c[k] * (pk[k + 1] - pk[k - 1]) / (2 * k + 1);
    return s;
  };
  constexpr int kSamples = 64;
  double total = 0.0;
  double x_prev = -1.0, f_prev = value(-1.0), a_prev = 0.0;
  for (int s = 1; s <= kSamples; ++s) {
    const double x = -1.0 + 2.0 * s / kSamples;
    const double fx = value(x);
    if ((f_prev < 0.0) != (fx < 0.0) && f_prev != 0.0 && fx != 0.0) {
      double lo = x_prev, hi = x, flo = f_prev;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = value(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      const double ar = antiderivative(root);
      total += std::abs(ar - a_prev);
      a_prev = ar;
    }
    x_prev = x;
    f_prev = fx;
  }
  total += std::abs(antiderivative(1.0) - a_prev);
  return total;
}

}  // namespace

double mixed_norm(const RadialTable& g, double p) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  const std::size_t nt = g.tau.size();
  const bool panels = g.tau_order > 0 && nt % g.tau_order == 0;
  const QuadratureRule gl = gauss_legendre(panels ? g.tau_order : 1);
  const double half_width = panels ? 0.5 * g.tau_max / (nt / g.tau_order) : 0.0;
  std::vector<double> inner(g.r.size());
  parallel_for(g.r.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> v(panels ? g.tau_order : 0);
    for (std::size_t i = begin; i < end; ++i) {
      CompensatedSum<double> s;
      if (panels) {
        for (std::size_t q = 0; q < nt; q += g.tau_order) {
          for (int k = 0; k < g.tau_order; ++k) {
            v[k] = g.at(i, q + k) * std::pow(g.tau[q + k], g.m - 1);
          }
          s.add(half_width * abs_integral_panel(v.data(), gl));
        }
        inner[i] = sphere_area(g.m) * s.value();
      } else {
        for (std::size_t j = 0; j < nt; ++j) s.add(g.tau_weights[j] * std::abs(g.at(i, j)));
        inner[i] = s.value();
      }
    }
  });
  CompensatedSum<double> outer;
  for (std::size_t i = 0; i < g.r.size(); ++i) outer.add(g.r_weights[i] * std::pow(inner[i], p));
  return std::pow(outer.value(), 1.0 / p);
}

double mixed_norm(const GroupFunction& g, double p) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  if (g.backend() != GroupFunction::Backend::Grid) {
    throw BackendMismatch("mixed_norm on a group function needs grid samples");
  }
  const GridField& f = g.grid_field();
  const int zd = 2 * g.n();
  std::size_t t_size = 1;
  double dt = 1.0, dz = 1.0;
  for (int d = 0; d < f.grid.dims(); ++d) {
    if (d >= zd) {
      t_size *= f.grid.axis(d).count;
      dt *= f.grid.axis(d).spacing();
    } else {
      dz *= f.grid.axis(d).spacing();
    }
  }
  CompensatedSum<double> outer;
  for (std::size_t z = 0; z < f.values.size() / t_size; ++z) {
    CompensatedSum<double> inner;
    for (std::size_t j = 0; j < t_size; ++j) inner.add(std::abs(f.values[z * t_size + j]));
    outer.add(std::pow(dt * inner.value(), p));
  }
  return std::pow(dz * outer.value(), 1.0 / p);
}

double lp_norm(const RadialTable& f, double p) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  CompensatedSum<double> s;
  for (std::size_t i = 0; i < f.r.size(); ++i)
    for (std::size_t j = 0; j < f.tau.size(); ++j)
      s.add(f.r_weights[i] * f.tau_weights[j] * std::pow(std::abs(f.at(i, j)), p));
  return std::pow(s.value(), 1.0 / p);
}

SharpnessGrid SharpnessGrid::doubled() const {
  SharpnessGrid d = *this;
  d.radii = 2 * radii - 1;
  d.t_per_axis = 2 * t_per_axis - 1;
  d.sphere_resolution *= 2;
  d.qmc_points *= 2;
  return d;
}

SampleLayout SharpnessGrid::layout(const SharpnessInstance& inst) const {
  if (radii < 2 || t_per_axis < 1) throw DomainError("sharpness grid needs >= 2 radii and >= 1 t point");
  SampleLayout l;
  for (int i = 0; i < radii; ++i) l.radii.push_back(r_max * i / (radii - 1));
  const int m = inst.m;
  std::size_t total = 1;
  for (int d = 0; d < m; ++d) total *= t_per_axis;
  std::vector<int> idx(m, 0);
  for (std::size_t q = 0; q < total; ++q) {
    std::size_t rest = q;
    for (int d = m - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(rest % t_per_axis);
      rest /= t_per_axis;
    }
    for (int d = 0; d < m; ++d) {
      const double off = t_per_axis == 1 ? 0.0 : -t_extent + 2.0 * t_extent * idx[d] / (t_per_axis - 1);
      l.t_points.push_back(inst.h.center[d] + off);
    }
  }
  return l;
}

double sample_lq_norm(const GroupSamples& s, double q) {
  if (!(q >= 1.0)) throw DomainError("q must be >= 1");
  const std::vector<double> w = radial_weights(s);
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < s.radii.size(); ++i)
    for (std::size_t j = 0; j < s.t_count(); ++j) acc.add(w[i] * std::pow(std::abs(s.at(i, j)), q));
  return std::pow(acc.value(), 1.0 / q);
}

double sharpness_norm_ratio(const SharpnessReport& rep, double q) {
  const GroupSamples& cf = rep.closed_form;
  if (cf.radii.empty() || cf.radii.front() != 0.0) throw ShapeMismatch("the layout must start at |z| = 0");
  const double scale = std::pow(cf.n, cf.n - 1) / 3.0;
  CompensatedSum<double> acc;
  for (std::size_t j = 0; j < cf.t_count(); ++j) acc.add(std::pow(std::abs(cf.at(0, j)) / scale, q));
  const double denom = std::pow(acc.value(), 1.0 / q);
  if (!(denom > 0)) throw NonPositiveValue("h * (dsigma_n)^ vanishes on the layout");
  return sample_lq_norm(rep.projection, q) / denom;
}

SharpnessReport verify_sharpness_identity(const SharpnessInstance& inst, const SharpnessGrid& grid) {
  const int n = inst.n, m = inst.m;
  const HTypeGroup group = build_htype_group(m, n);
  const SampleLayout layout = grid.layout(inst);
  RestrictionOptions opts;
  opts.sphere_resolution = grid.sphere_resolution;
  opts.qmc_points = grid.qmc_points;
  // the gap itself measures the sphere-rule error; only report the residual
  opts.sphere_tolerance = std::numeric_limits<double>::infinity();
  const double mu = 2.0 * n * n;
  const ProjectionResult pr =
      restriction_apply(group, SpectralProfile::delta(), GroupFunction::spectral(inst.f), mu, layout, opts);
  SharpnessReport rep;
  rep.projection = pr.values.samples;
  rep.k_used = pr.k_used;
  rep.sphere_residual = pr.sphere_residual;
  rep.psi_at_n = bump(inst.knots, n);
  rep.closed_form = make_samples(n, m, layout.radii, layout.t_points);
  const double pre = std::pow(static_cast<double>(n), n - 1) / 3.0;
  for (std::size_t j = 0; j < rep.closed_form.t_count(); ++j) {
    const Complex conv = gaussian_sphere_convolution(inst.h, n, rep.closed_form.t_point(j));
    for (std::size_t i = 0; i < layout.radii.size(); ++i) {
      const double r = layout.radii[i];
      rep.closed_form.at(i, j) = pre * std::exp(-0.25 * n * r * r) * conv;
    }
  }
  rep.gap = relative_sample_error(rep.projection, rep.closed_form);
  rep.projection_norm = std::sqrt(sample_norm2(rep.projection));
  rep.closed_form_norm = std::sqrt(sample_norm2(rep.closed_form));
  // ratio field P f / e^{-n r^2/4} against its r = 0 row
  double ref_max = 0.0;
  for (std::size_t j = 0; j < rep.projection.t_count(); ++j) ref_max = std::max(ref_max, std::abs(rep.projection.at(0, j)));
  for (std::size_t i = 1; i < layout.radii.size(); ++i) {
    const double gauss = std::exp(-0.25 * n * layout.radii[i] * layout.radii[i]);
    if (gauss < 1e-6) continue;
    for (std::size_t j = 0; j < rep.projection.t_count(); ++j) {
      const double d = std::abs(rep.projection.at(i, j) / gauss - rep.projection.at(0, j));
      if (ref_max > 0.0) rep.separability = std::max(rep.separability, d / ref_max);
    }
  }
  return rep;
}

}  // namespace htype
