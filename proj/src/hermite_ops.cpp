#include <algorithm>
#include <cmath>
#include <string>

#include "htype/hermite.hpp"
#include "htype/laguerre.hpp"
#include "htype/quadrature.hpp"

namespace htype {

PlancherelNormalization resolve_plancherel_normalization() {
  // phi_0^1 decays like exp(-|z|^2/4); R = 12 puts the frame below 1e-15.
  const TensorGrid grid = plane_grid(128, 12.0);
  const PlaneFunction phi0 = PlaneFunction::laguerre(0, 1, 1.0);
  const PlaneFunction f = to_grid(phi0, grid);
  const GridField out = twisted_convolution(f, phi0, 1.0).grid_field();
  const int N = grid.axis(0).count;
  PlancherelNormalization r;
  r.reproducing_constant = out.values[static_cast<std::size_t>(N / 2) * N + N / 2].real();
  r.expansion_consistency = r.reproducing_constant / (2.0 * kPi);
  r.reproducing_residual =
      relative_l2_error(out, scaled(f.grid_field(), r.reproducing_constant));
  const double ratio = std::pow(l2_norm(out) / l2_norm(f.grid_field()), 2);
  const double e = std::log(ratio) / std::log(2.0 * kPi);
  const double rounded = std::round(e);
  if (std::abs(e - rounded) > 1e-6 || std::abs(r.expansion_consistency - 1.0) > 1e-10) {
    throw Error("normalization oracle did not settle: exponent " + std::to_string(e) +
                ", consistency " + std::to_string(r.expansion_consistency));
  }
  r.exponent_per_n = rounded;  // n = 1 here
  return r;
}

const PlancherelNormalization& plancherel_normalization() {
  static const PlancherelNormalization cached = resolve_plancherel_normalization();
  return cached;
}

double l2_norm2(const PlaneFunction& f) {
  using B = PlaneFunction::Backend;
  switch (f.backend()) {
    case B::Grid:
      return std::pow(l2_norm(f.grid_field()), 2);
    case B::Radial:
      return f.expansion().norm2();
    case B::Analytic:
      break;
  }
  const AnalyticPlane& a = f.closed_form();
  if (!a.radial()) return std::pow(l2_norm(to_grid(f, plane_grid()).grid_field()), 2);
  const QuadratureRule rule = radial_rule(a.n, a.radius, 64);
  CompensatedSum<double> s;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = a.profile(rule.nodes[i]);
    s.add(rule.weights[i] * v * v);
  }
  return std::norm(a.scale) * s.value();
}

namespace {

bool radial_path(const PlaneFunction& f) {
  return f.backend() == PlaneFunction::Backend::Radial ||
         (f.backend() == PlaneFunction::Backend::Analytic && f.closed_form().radial());
}

}  // namespace

Reconstruction reconstruct(const PlaneFunction& f, double lambda, int K,
                           const ReconstructOptions& opts) {
  if (!(lambda > 0)) throw DomainError("reconstruction needs lambda > 0");
  const int n = f.n();
  const double scale = std::pow(lambda / (2.0 * kPi), n);
  const double plancherel = std::pow(lambda / (2.0 * kPi), plancherel_normalization().exponent_per_n * n);
  const int last = K >= 0 ? K : opts.max_k;
  Reconstruction rec;
  CompensatedSum<double> captured;
  auto record = [&](double term) {
    rec.term_norm2.push_back(plancherel * term);
    captured.add(plancherel * term);
    const double t = rec.input_norm2 > 0.0 ? (rec.input_norm2 - captured.value()) / rec.input_norm2 : 0.0;
    rec.tail.push_back(std::max(0.0, t));
    ++rec.terms;
    return K < 0 && rec.tail.back() <= opts.tail_tolerance;
  };

  if (radial_path(f)) {
    RadialExpansion a;
    if (f.backend() == PlaneFunction::Backend::Radial) {
      a = f.expansion();
      if (a.lambda != lambda) throw BackendMismatch("radial expansion scale differs from lambda");
    } else {
      a = radial_expansion(f.closed_form(), lambda, std::max(last, 0));
    }
    rec.input_norm2 = l2_norm2(f);
    RadialExpansion partial;
    partial.n = n;
    partial.lambda = lambda;
    const double c = std::pow(2.0 * kPi / lambda, n);
    for (int k = 0; k <= last; ++k) {
      const Complex ck = k < static_cast<int>(a.coeffs.size()) ? a.coeffs[k] : Complex(0.0);
      partial.coeffs.push_back(scale * c * ck);
      if (record(std::norm(c * ck) * laguerre_function_norm2(k, n, lambda))) break;
    }
    rec.partial_sum = PlaneFunction::radial(std::move(partial));
    return rec;
  }

  const PlaneFunction fg = f.backend() == PlaneFunction::Backend::Grid
                               ? f
                               : to_grid(f, opts.convolution.default_grid);
  rec.input_norm2 = std::pow(l2_norm(fg.grid_field()), 2);
  const TensorGrid& in = fg.grid_field().grid;
  const int N = in.axis(0).count;
  const double h = in.axis(0).spacing();
  GridField partial(in);
  for (int k = 0; k <= last; ++k) {
    // f x phi_k spreads out to the turning radius of phi_k; norms are taken
    // on a lattice extension that covers it.
    const double reach = std::sqrt(2.0 * (4.0 * k + 2.0 * n) / lambda) + 6.0 / std::sqrt(lambda);
    const int pad = std::max(0, static_cast<int>(std::ceil((reach - in.axis(0).half_extent) / h)));
    ConvolutionOptions co = opts.convolution;
    co.output_grid = plane_grid(N + 2 * pad, 0.5 * (N + 2 * pad) * h);
    const GridField term = hermite_project(fg, k, lambda, co).grid_field();
    const int M = N + 2 * pad;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        partial.values[static_cast<std::size_t>(i) * N + j] +=
            scale * term.values[static_cast<std::size_t>(i + pad) * M + j + pad];
      }
    if (record(std::pow(l2_norm(term), 2))) break;
  }
  rec.partial_sum = PlaneFunction::grid(std::move(partial));
  return rec;
}

PlancherelReport plancherel_check(const PlaneFunction& f, double lambda, int K,
                                  const ReconstructOptions& opts) {
  const Reconstruction rec = reconstruct(f, lambda, K, opts);
  PlancherelReport r;
  r.lhs = rec.input_norm2;
  CompensatedSum<double> s;
  for (double t : rec.term_norm2) s.add(t);
  r.rhs = s.value();
  r.gap = r.lhs > 0.0 ? std::abs(r.lhs - r.rhs) / r.lhs : std::abs(r.rhs);
  r.terms = rec.terms;
  r.exponent_per_n = plancherel_normalization().exponent_per_n;
  return r;
}

GridField angular_term(const GridField& f, double lambda) {
  const GridField dx = spectral_derivative(f, 0, 1);
  const GridField dy = spectral_derivative(f, 1, 1);
  GridField out(f.grid);
  const int N = f.grid.axis(0).count;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * N + j;
      const double x = f.grid.axis(0).point(i);
      const double y = f.grid.axis(1).point(j);
      out.values[q] = Complex(0.0, -lambda) * (x * dy.values[q] - y * dx.values[q]);
    }
  return out;
}

PlaneFunction twisted_laplacian_apply(const PlaneFunction& f, double lambda, double tolerance) {
  if (f.backend() == PlaneFunction::Backend::Radial) {
    RadialExpansion e = f.expansion();
    if (e.lambda != lambda) throw BackendMismatch("radial expansion scale differs from lambda");
    for (std::size_t k = 0; k < e.coeffs.size(); ++k) e.coeffs[k] *= (2.0 * k + e.n) * lambda;
    return PlaneFunction::radial(std::move(e));
  }
  const PlaneFunction fg = f.backend() == PlaneFunction::Backend::Grid ? f : to_grid(f, plane_grid());
  const GridField& g = fg.grid_field();
  require_resolved(g, tolerance);
  GridField out = angular_term(g, lambda);
  axpy(-1.0, spectral_derivative(g, 0, 2), out);
  axpy(-1.0, spectral_derivative(g, 1, 2), out);
  const int N = g.grid.axis(0).count;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * N + j;
      const double x = g.grid.axis(0).point(i);
      const double y = g.grid.axis(1).point(j);
      out.values[q] += 0.25 * lambda * lambda * (x * x + y * y) * g.values[q];
    }
  return PlaneFunction::grid(std::move(out));
}

namespace {

double lp_norm(const GridField& f, double p) {
  CompensatedSum<double> s;
  for (const auto& v : f.values) s.add(std::pow(std::abs(v), p));
  return std::pow(s.value() * f.grid.cell_volume(), 1.0 / p);
}

// r_j(lambda) for j = 0..k on the grid dilated by lambda.
std::vector<double> probe_ratios(const AnalyticPlane& f, int k, double lambda, double p,
                                 const ScalingOptions& opts) {
  const double root = std::sqrt(lambda);
  const TensorGrid grid = plane_grid(opts.count, opts.base_half_extent / root);
  const GridField fl = sample_field(grid, [&](std::span<const double> z) {
    const double u[2] = {root * z[0], root * z[1]};
    return f.value(u);
  });
  const double denom = lp_norm(fl, p);
  if (!(denom > 0)) throw DomainError("scaling probe needs a nonzero input");
  const PlaneFunction fp = PlaneFunction::grid(fl);
  std::vector<double> out;
  for (int j = 0; j <= k; ++j) {
    const GridField conv = hermite_project(fp, j, lambda).grid_field();
    out.push_back(l2_norm(conv) / denom);
  }
  return out;
}

}  // namespace

ScalingReport projection_scaling_probe(const AnalyticPlane& f, int k, double lambda, double p,
                                       const ScalingOptions& opts) {
  if (f.n != 1) throw BackendMismatch("the scaling probe runs on the n = 1 grid backend");
  if (!(lambda > 0)) throw DomainError("scaling probe needs lambda > 0");
  if (k < 0) throw DomainError("degree must be non-negative");
  const int n = f.n;
  const double p_max = (6.0 * n + 2.0) / (3.0 * n + 4.0);
  ScalingReport r;
  r.lambda = lambda;
  r.p = p;
  r.k = k;
  r.in_estimate_range = p >= 1.0 && p < p_max;
  if (p < 1.0 || (!r.in_estimate_range && !opts.allow_outside_range)) {
    throw ExponentOutOfRange("p = " + std::to_string(p) + " is outside [1, " +
                             std::to_string(p_max) + ")");
  }
  const std::vector<double> at_lambda = probe_ratios(f, k, lambda, p, opts);
  const std::vector<double> at_one = lambda == 1.0 ? at_lambda : probe_ratios(f, k, 1.0, p, opts);
  r.ratio_at_lambda = at_lambda[k];
  r.ratio_at_one = at_one[k];
  r.observed = r.ratio_at_lambda / r.ratio_at_one;
  r.expected = std::pow(lambda, n * (1.0 / p - 1.5));
  r.relative_error = std::abs(r.observed - r.expected) / r.expected;
  const double trend = n * (1.0 / p - 0.5) - 0.5;
  for (int j = 0; j <= k; ++j) r.k_curve.push_back(at_lambda[j] * std::pow(2.0 * j + n, -trend));
  return r;
}

}  // namespace htype
