#include "htype/hermite.hpp"

#include <algorithm>
#include <string>

#include "htype/laguerre.hpp"
#include "htype/quadrature.hpp"

namespace htype {

Complex RadialExpansion::value(double r) const {
  if (coeffs.empty()) return 0.0;
  std::vector<double> seq(coeffs.size());
  laguerre_function_sequence(n, lambda, r * r, seq);
  Complex s = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * seq[k];
  return s;
}

double RadialExpansion::norm2() const {
  CompensatedSum<double> s;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    s.add(std::norm(coeffs[k]) * laguerre_function_norm2(static_cast<int>(k), n, lambda));
  }
  return s.value();
}

PlaneFunction PlaneFunction::grid(GridField f) {
  if (f.grid.dims() != 2) {
    throw ShapeMismatch("grid plane functions are limited to n = 1 (two axes)");
  }
  const Axis& a = f.grid.axis(0);
  const Axis& b = f.grid.axis(1);
  if (a.count != b.count || a.half_extent != b.half_extent) {
    throw ShapeMismatch("grid plane functions need identical x and y axes");
  }
  PlaneFunction p;
  p.n_ = 1;
  p.data_ = std::move(f);
  return p;
}

PlaneFunction PlaneFunction::radial(RadialExpansion e) {
  if (e.n < 1 || !(e.lambda > 0)) throw DomainError("radial expansion needs n >= 1, lambda > 0");
  PlaneFunction p;
  p.n_ = e.n;
  p.data_ = std::move(e);
  return p;
}

PlaneFunction PlaneFunction::analytic(AnalyticPlane a) {
  if (a.n < 1) throw DomainError("analytic plane function needs n >= 1");
  if (!a.value && a.profile) {
    auto prof = a.profile;
    const Complex c = a.scale;
    a.value = [prof, c](std::span<const double> z) {
      double r2 = 0.0;
      for (double v : z) r2 += v * v;
      return c * prof(std::sqrt(r2));
    };
  }
  if (!a.value) throw DomainError("analytic plane function has no evaluator");
  PlaneFunction p;
  p.n_ = a.n;
  p.data_ = std::move(a);
  return p;
}

PlaneFunction PlaneFunction::gaussian(int n, double a) {
  AnalyticPlane g;
  g.n = n;
  g.profile = [a](double r) { return std::exp(-a * r * r); };
  g.radius = std::sqrt(34.0 / a);
  g.label = "gaussian";
  return analytic(std::move(g));
}

PlaneFunction PlaneFunction::laguerre(int k, int n, double lambda) {
  AnalyticPlane g;
  g.n = n;
  g.profile = [k, n, lambda](double r) { return laguerre_function(k, n, lambda, r * r); };
  // beyond the turning point the Gaussian envelope takes over
  g.radius = std::sqrt(2.0 * (4.0 * k + 2.0 * n) / lambda) + std::sqrt(140.0 / lambda);
  g.label = "laguerre";
  return analytic(std::move(g));
}

PlaneFunction::Backend PlaneFunction::backend() const {
  return static_cast<Backend>(data_.index());
}

const GridField& PlaneFunction::grid_field() const {
  if (const auto* g = std::get_if<GridField>(&data_)) return *g;
  throw BackendMismatch("plane function is not grid-backed");
}

const RadialExpansion& PlaneFunction::expansion() const {
  if (const auto* e = std::get_if<RadialExpansion>(&data_)) return *e;
  throw BackendMismatch("plane function is not a radial expansion");
}

const AnalyticPlane& PlaneFunction::closed_form() const {
  if (const auto* a = std::get_if<AnalyticPlane>(&data_)) return *a;
  throw BackendMismatch("plane function is not analytic");
}

Complex PlaneFunction::operator()(std::span<const double> z) const {
  if (static_cast<int>(z.size()) != 2 * n_) throw ShapeMismatch("point must lie in R^{2n}");
  switch (backend()) {
    case Backend::Radial: {
      double r2 = 0.0;
      for (double v : z) r2 += v * v;
      return expansion().value(std::sqrt(r2));
    }
    case Backend::Analytic:
      return closed_form().value(z);
    case Backend::Grid:
      break;
  }
  throw BackendMismatch("pointwise evaluation is not defined for grid samples");
}

TensorGrid plane_grid(int count, double half_extent) {
  return TensorGrid({Axis{count, half_extent}, Axis{count, half_extent}});
}

PlaneFunction to_grid(const PlaneFunction& f, const TensorGrid& grid) {
  if (f.backend() == PlaneFunction::Backend::Grid) {
    if (!f.grid_field().grid.same_as(grid)) throw BackendMismatch("grid functions on different grids");
    return f;
  }
  if (f.n() != 1) throw BackendMismatch("grid backend is limited to n = 1");
  return PlaneFunction::grid(sample_field(grid, [&](std::span<const double> z) { return f(z); }));
}

namespace {

// Kernel table over lattice differences d = (d0, d1) in [lo, hi]^2 (units
// of the spacing), stored row-major in d0 with the d1 index reversed so the
// inner convolution loop runs forward through memory.
struct KernelTable {
  int lo = 0;
  int hi = 0;
  std::vector<double> re;
  std::vector<double> im;
  bool real = true;

  int width() const { return hi - lo + 1; }
  std::size_t slot(int d0, int d1) const {
    return static_cast<std::size_t>(d0 - lo) * width() + (hi - d1);
  }
};

// Output point i and input point j differ by (i - j - shift) spacings.
int lattice_shift(int n_out, int n_in) { return (n_out - n_in) / 2; }

KernelTable make_table(int n_out, int n_in, const std::function<Complex(int, int)>& k) {
  KernelTable t;
  const int shift = lattice_shift(n_out, n_in);
  t.lo = -(n_in - 1) - shift;
  t.hi = n_out - 1 - shift;
  const std::size_t sz = static_cast<std::size_t>(t.width()) * t.width();
  t.re.assign(sz, 0.0);
  t.im.assign(sz, 0.0);
  for (int d0 = t.lo; d0 <= t.hi; ++d0) {
    for (int d1 = t.lo; d1 <= t.hi; ++d1) {
      const Complex v = k(d0, d1);
      t.re[t.slot(d0, d1)] = v.real();
      t.im[t.slot(d0, d1)] = v.imag();
      if (v.imag() != 0.0) t.real = false;
    }
  }
  return t;
}

KernelTable table_from_grid(const GridField& g, int n_out) {
  const int N = g.grid.axis(0).count;
  return make_table(n_out, N, [&](int d0, int d1) -> Complex {
    const int i0 = d0 + N / 2;
    const int i1 = d1 + N / 2;
    if (i0 < 0 || i0 >= N || i1 < 0 || i1 >= N) return 0.0;
    return g.values[static_cast<std::size_t>(i0) * N + i1];
  });
}

KernelTable table_from_function(const PlaneFunction& f, double h, int n_out, int n_in) {
  if (f.backend() == PlaneFunction::Backend::Analytic && f.closed_form().radial()) {
    const auto& prof = f.closed_form().profile;
    const Complex c = f.closed_form().scale;
    // radial kernels depend only on d0^2 + d1^2
    const int reach = std::max(n_out, n_in);
    std::vector<double> by_r2(2 * reach * reach + 1, std::nan(""));
    return make_table(n_out, n_in, [&](int d0, int d1) -> Complex {
      const int q = d0 * d0 + d1 * d1;
      if (std::isnan(by_r2[q])) by_r2[q] = prof(h * std::sqrt(double(q)));
      return c * by_r2[q];
    });
  }
  return make_table(n_out, n_in, [&](int d0, int d1) {
    const double z[2] = {d0 * h, d1 * h};
    return f(z);
  });
}

// out(z) = h^2 sum_w s(w) K(z - w) exp(sign i lambda/2 (y u - x v)),
// z = (x, y) on `out_grid`, w = (u, v) on the grid of s.
GridField twisted_sum(const GridField& s, const TensorGrid& out_grid, const KernelTable& tab,
                      double lambda, int sign) {
  const int N = s.grid.axis(0).count;
  const int M = out_grid.axis(0).count;
  const double h = s.grid.axis(0).spacing();
  const int shift = lattice_shift(M, N);
  const int W = tab.width();
  const Axis& in_axis = s.grid.axis(0);
  const Axis& out_axis = out_grid.axis(0);
  // e[a * N + b] = exp(sign i lambda/2 p_out(a) p_in(b))
  std::vector<Complex> e(static_cast<std::size_t>(M) * N);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < N; ++b) {
      e[static_cast<std::size_t>(a) * N + b] =
          std::polar(1.0, sign * 0.5 * lambda * out_axis.point(a) * in_axis.point(b));
    }
  // Rows and column ranges of s that carry any mass.
  double peak = 0.0;
  for (const auto& v : s.values) peak = std::max(peak, std::abs(v));
  const double floor = 1e-18 * peak;
  std::vector<int> first(N, N), last(N, -1);
  for (int j0 = 0; j0 < N; ++j0)
    for (int j1 = 0; j1 < N; ++j1) {
      if (std::abs(s.values[static_cast<std::size_t>(j0) * N + j1]) > floor) {
        first[j0] = std::min(first[j0], j1);
        last[j0] = std::max(last[j0], j1);
      }
    }
  GridField out(out_grid);
  parallel_for(M, [&](std::size_t begin, std::size_t end) {
    std::vector<double> ar(static_cast<std::size_t>(N) * N), ai(ar.size());
    for (std::size_t i0 = begin; i0 < end; ++i0) {
      for (int j0 = 0; j0 < N; ++j0)
        for (int j1 = 0; j1 < N; ++j1) {
          const std::size_t q = static_cast<std::size_t>(j0) * N + j1;
          const Complex a = s.values[q] * std::conj(e[i0 * N + j1]);
          ar[q] = a.real();
          ai[q] = a.imag();
        }
      for (int i1 = 0; i1 < M; ++i1) {
        Complex acc = 0.0;
        for (int j0 = 0; j0 < N; ++j0) {
          if (last[j0] < 0) continue;
          const int d0 = static_cast<int>(i0) - j0 - shift;
          // slot(d0, i1 - j1 - shift) = row + (hi - i1 + shift) + j1
          const std::size_t base =
              static_cast<std::size_t>(d0 - tab.lo) * W + (tab.hi - i1 + shift);
          const double* kr = tab.re.data() + base;
          const double* ki = tab.im.data() + base;
          const double* xr = ar.data() + static_cast<std::size_t>(j0) * N;
          const double* xi = ai.data() + static_cast<std::size_t>(j0) * N;
          double sr = 0.0, si = 0.0;
          const int lo = first[j0], hi = last[j0];
          if (tab.real) {
            for (int j1 = lo; j1 <= hi; ++j1) {
              sr += xr[j1] * kr[j1];
              si += xi[j1] * kr[j1];
            }
          } else {
            for (int j1 = lo; j1 <= hi; ++j1) {
              sr += xr[j1] * kr[j1] - xi[j1] * ki[j1];
              si += xr[j1] * ki[j1] + xi[j1] * kr[j1];
            }
          }
          acc += e[static_cast<std::size_t>(i1) * N + j0] * Complex(sr, si);
        }
        out.values[i0 * M + i1] = acc * (h * h);
      }
    }
  });
  return out;
}

TensorGrid output_grid_for(const GridField& s, const ConvolutionOptions& opts) {
  if (!opts.output_grid) return s.grid;
  const TensorGrid& g = *opts.output_grid;
  const Axis& in = s.grid.axis(0);
  if (g.dims() != 2 || g.axis(0).count != g.axis(1).count ||
      g.axis(0).half_extent != g.axis(1).half_extent ||
      std::abs(g.axis(0).spacing() - in.spacing()) > 1e-12 * in.spacing() ||
      (g.axis(0).count - in.count) % 2 != 0) {
    throw ShapeMismatch("output grid must share the input lattice");
  }
  return g;
}

void check_frame(const GridField& g, double tolerance, const char* which) {
  const int N = g.grid.axis(0).count;
  double peak = 0.0, edge = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double a = std::abs(g.values[static_cast<std::size_t>(i) * N + j]);
      peak = std::max(peak, a);
      if (i < 2 || j < 2 || i >= N - 2 || j >= N - 2) edge = std::max(edge, a);
    }
  if (peak > 0.0 && edge > tolerance * peak) {
    throw TruncationError(std::string(which) + " operand carries relative mass " +
                          std::to_string(edge / peak) + " on the grid boundary");
  }
}

RadialExpansion as_expansion(const PlaneFunction& f, double lambda) {
  if (f.backend() == PlaneFunction::Backend::Radial) {
    if (f.expansion().lambda != lambda) {
      throw BackendMismatch("radial expansion scale differs from the convolution scale");
    }
    return f.expansion();
  }
  return radial_expansion(f.closed_form(), lambda);
}

bool is_radial(const PlaneFunction& f) {
  return f.backend() == PlaneFunction::Backend::Radial ||
         (f.backend() == PlaneFunction::Backend::Analytic && f.closed_form().radial());
}

}  // namespace

RadialExpansion radial_expansion(const AnalyticPlane& f, double lambda, int max_k,
                                 double tail_tolerance) {
  if (!f.radial()) throw BackendMismatch("coefficient algebra needs a radial function");
  const int panels = 16 + max_k / 4;
  const QuadratureRule rule = radial_rule(f.n, f.radius, panels);
  std::vector<double> fv(rule.size());
  CompensatedSum<double> norm;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    fv[i] = f.profile(rule.nodes[i]);
    norm.add(rule.weights[i] * fv[i] * fv[i]);
  }
  std::vector<std::vector<double>> seq(rule.size(), std::vector<double>(max_k + 1));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    laguerre_function_sequence(f.n, lambda, rule.nodes[i] * rule.nodes[i], seq[i]);
  }
  RadialExpansion e;
  e.n = f.n;
  e.lambda = lambda;
  CompensatedSum<double> captured;
  for (int k = 0; k <= max_k; ++k) {
    CompensatedSum<double> ip;
    for (std::size_t i = 0; i < rule.size(); ++i) ip.add(rule.weights[i] * fv[i] * seq[i][k]);
    const double nk = laguerre_function_norm2(k, f.n, lambda);
    const double c = ip.value() / nk;
    e.coeffs.push_back(f.scale * c);
    captured.add(c * c * nk);
    // the captured norm reaches ||f||^2 to rounding long before tiny tolerances
    // are met, so the last term must be small as well
    if (norm.value() - captured.value() <= tail_tolerance * norm.value() &&
        c * c * nk <= tail_tolerance * norm.value()) {
      break;
    }
  }
  return e;
}

PlaneFunction twisted_convolution(const PlaneFunction& f, const PlaneFunction& g, double lambda,
                                  const ConvolutionOptions& opts) {
  if (!(lambda != 0.0) || !std::isfinite(lambda)) {
    throw DomainError("twisted convolution needs a nonzero finite lambda");
  }
  if (f.n() != g.n()) throw ShapeMismatch("operands live on different dimensions");
  using B = PlaneFunction::Backend;
  const bool fg = f.backend() == B::Grid;
  const bool gg = g.backend() == B::Grid;
  if (!fg && !gg && is_radial(f) && is_radial(g)) {
    // radial operands give a radial result, which the reflection y -> -y
    // relating the two orientations leaves fixed
    const double lam = std::abs(lambda);
    const RadialExpansion a = as_expansion(f, lam);
    const RadialExpansion b = as_expansion(g, lam);
    RadialExpansion out;
    out.n = f.n();
    out.lambda = lam;
    const double c = std::pow(2.0 * kPi / lam, f.n());
    const std::size_t len = std::min(a.coeffs.size(), b.coeffs.size());
    for (std::size_t k = 0; k < len; ++k) out.coeffs.push_back(c * a.coeffs[k] * b.coeffs[k]);
    return PlaneFunction::radial(std::move(out));
  }
  if (f.n() != 1) throw BackendMismatch("non-radial convolution needs the n = 1 grid backend");
  if (fg && gg) {
    if (!f.grid_field().grid.same_as(g.grid_field().grid)) {
      throw ShapeMismatch("grid operands on different grids");
    }
    check_frame(f.grid_field(), opts.truncation_tolerance, "first");
    check_frame(g.grid_field(), opts.truncation_tolerance, "second");
    const TensorGrid og = output_grid_for(f.grid_field(), opts);
    return PlaneFunction::grid(twisted_sum(
        f.grid_field(), og, table_from_grid(g.grid_field(), og.axis(0).count), lambda, -1));
  }
  if (fg) {
    check_frame(f.grid_field(), opts.truncation_tolerance, "first");
    const TensorGrid og = output_grid_for(f.grid_field(), opts);
    const Axis& ax = f.grid_field().grid.axis(0);
    return PlaneFunction::grid(twisted_sum(
        f.grid_field(), og, table_from_function(g, ax.spacing(), og.axis(0).count, ax.count),
        lambda, -1));
  }
  if (gg) {
    check_frame(g.grid_field(), opts.truncation_tolerance, "second");
    const TensorGrid og = output_grid_for(g.grid_field(), opts);
    const Axis& ax = g.grid_field().grid.axis(0);
    return PlaneFunction::grid(twisted_sum(
        g.grid_field(), og, table_from_function(f, ax.spacing(), og.axis(0).count, ax.count),
        lambda, +1));
  }
  const PlaneFunction fs = to_grid(f, opts.default_grid);
  check_frame(fs.grid_field(), opts.truncation_tolerance, "first");
  const TensorGrid og = output_grid_for(fs.grid_field(), opts);
  const Axis& ax = fs.grid_field().grid.axis(0);
  return PlaneFunction::grid(twisted_sum(
      fs.grid_field(), og, table_from_function(g, ax.spacing(), og.axis(0).count, ax.count),
      lambda, -1));
}

PlaneFunction hermite_project(const PlaneFunction& f, int k, double lambda,
                              const ConvolutionOptions& opts) {
  if (k < 0) throw DomainError("degree must be non-negative");
  if (!(lambda != 0.0) || !std::isfinite(lambda)) {
    throw DomainError("projection needs a nonzero finite lambda");
  }
  const double lam = std::abs(lambda);
  if (is_radial(f) && f.backend() != PlaneFunction::Backend::Grid) {
    const RadialExpansion a = as_expansion(f, lam);
    RadialExpansion out;
    out.n = f.n();
    out.lambda = lam;
    out.coeffs.assign(k + 1, 0.0);
    if (k < static_cast<int>(a.coeffs.size())) {
      out.coeffs[k] = std::pow(2.0 * kPi / lam, f.n()) * a.coeffs[k];
    }
    return PlaneFunction::radial(std::move(out));
  }
  return twisted_convolution(f, PlaneFunction::laguerre(k, f.n(), lam), lambda, opts);
}

}  // namespace htype
