#include "htype/group_function.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "htype/quadrature.hpp"
#include "htype/sphere.hpp"

namespace htype {

GroupFunction GroupFunction::grid(int n, int m, GridField f) {
  if (n < 1 || m < 1) throw DomainError("group function needs n, m >= 1");
  if (f.grid.dims() != 2 * n + m) {
    throw ShapeMismatch("grid has " + std::to_string(f.grid.dims()) + " axes, expected " +
                        std::to_string(2 * n + m));
  }
  GroupFunction g;
  g.n_ = n;
  g.m_ = m;
  g.data_ = std::move(f);
  return g;
}

GroupFunction GroupFunction::spectral(SpectralGroupFunction f) {
  if (f.n < 1 || f.m < 1) throw DomainError("group function needs n, m >= 1");
  if (!f.amplitude || !f.profile) throw DomainError("spectral group function is incomplete");
  if (!(f.a_min >= 0.0 && f.a_max > f.a_min)) throw DomainError("empty amplitude support");
  GroupFunction g;
  g.n_ = f.n;
  g.m_ = f.m;
  g.data_ = std::move(f);
  return g;
}

const GridField& GroupFunction::grid_field() const {
  if (backend() != Backend::Grid) throw BackendMismatch("group function is not grid-backed");
  return std::get<GridField>(data_);
}

const SpectralGroupFunction& GroupFunction::spectral_form() const {
  if (backend() != Backend::Spectral) throw BackendMismatch("group function is not spectral");
  return std::get<SpectralGroupFunction>(data_);
}

GroupSamples make_samples(int n, int m, std::vector<double> radii, std::vector<double> t_points) {
  if (t_points.size() % m != 0) throw ShapeMismatch("t-points do not match the center dimension");
  GroupSamples s;
  s.n = n;
  s.m = m;
  s.radii = std::move(radii);
  s.t_points = std::move(t_points);
  s.values.assign(s.radii.size() * s.t_count(), 0.0);
  return s;
}

SpectralGroupFunction gaussian_group_function(int n, int m) {
  if (n < 1 || m < 1) throw DomainError("gaussian_group_function needs n, m >= 1");
  SpectralGroupFunction s;
  s.n = n;
  s.m = m;
  const double scale = std::pow(2.0 * kPi, m / 2.0);
  s.amplitude = [scale](std::span<const double> a) {
    double r2 = 0.0;
    for (double v : a) r2 += v * v;
    return Complex(scale * std::exp(-r2 / 2.0));
  };
  s.profile = [](double, double r) { return std::exp(-r * r / 4.0); };
  s.z_radius = [](double) { return 12.0; };
  s.a_max = 9.0;
  s.label = "gaussian";
  return s;
}

std::vector<double> radial_weights(const GroupSamples& s) {
  const std::size_t nr = s.radii.size();
  std::vector<double> w(nr, 1.0);
  if (nr < 2) return w;
  for (std::size_t i = 0; i < nr; ++i) {
    const double lo = i == 0 ? s.radii[0] : 0.5 * (s.radii[i - 1] + s.radii[i]);
    const double hi = i + 1 == nr ? s.radii[nr - 1] : 0.5 * (s.radii[i] + s.radii[i + 1]);
    w[i] = (hi - lo) * sphere_area(2 * s.n) * std::pow(s.radii[i], 2 * s.n - 1);
  }
  return w;
}

double sample_norm2(const GroupSamples& s) {
  const std::vector<double> w = radial_weights(s);
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < s.radii.size(); ++i)
    for (std::size_t j = 0; j < s.t_count(); ++j) acc.add(w[i] * std::norm(s.at(i, j)));
  return acc.value();
}

double relative_sample_error(const GroupSamples& f, const GroupSamples& reference) {
  if (f.values.size() != reference.values.size() || f.radii != reference.radii ||
      f.t_points != reference.t_points) {
    throw ShapeMismatch("sample sets differ");
  }
  GroupSamples d = f;
  for (std::size_t q = 0; q < d.values.size(); ++q) d.values[q] -= reference.values[q];
  const double den = sample_norm2(reference);
  return den > 0.0 ? std::sqrt(sample_norm2(d) / den) : std::sqrt(sample_norm2(d));
}

PlaneFunction central_fourier(const GroupFunction& f, std::span<const double> a) {
  if (static_cast<int>(a.size()) != f.m()) throw ShapeMismatch("a has the wrong dimension");
  double rho = 0.0;
  for (double v : a) rho += v * v;
  rho = std::sqrt(rho);
  if (f.backend() == GroupFunction::Backend::Spectral) {
    const SpectralGroupFunction& s = f.spectral_form();
    AnalyticPlane p;
    p.n = s.n;
    auto prof = s.profile;
    p.profile = [prof, rho](double r) { return prof(rho, r); };
    p.scale = s.amplitude(a);
    p.radius = s.radius_at(rho);
    p.label = s.label.empty() ? "central transform" : s.label + " central transform";
    return PlaneFunction::analytic(std::move(p));
  }
  if (f.n() != 1) throw BackendMismatch("grid central transform needs n = 1");
  const GridField& g = f.grid_field();
  const int zd = 2 * f.n();
  double dt = 1.0;
  for (int k = 0; k < f.m(); ++k) {
    const Axis& ax = g.grid.axis(zd + k);
    const double nyquist = kPi / ax.spacing();
    if (rho > nyquist) {
      throw AliasingError("|a| = " + std::to_string(rho) + " exceeds the t-grid Nyquist limit " +
                          std::to_string(nyquist));
    }
    dt *= ax.spacing();
  }
  std::size_t tsize = 1;
  for (int k = 0; k < f.m(); ++k) tsize *= g.grid.axis(zd + k).count;
  // e^{i<a,t>} over the t block, in the grid's row-major order
  std::vector<Complex> phase(tsize);
  for (std::size_t q = 0; q < tsize; ++q) {
    std::size_t rem = q;
    double arg = 0.0;
    for (int k = f.m() - 1; k >= 0; --k) {
      const Axis& ax = g.grid.axis(zd + k);
      arg += a[k] * ax.point(static_cast<int>(rem % ax.count));
      rem /= ax.count;
    }
    phase[q] = std::polar(dt, arg);
  }
  std::vector<Axis> zaxes = {g.grid.axis(0), g.grid.axis(1)};
  GridField out{TensorGrid(zaxes)};
  for (std::size_t p = 0; p < out.values.size(); ++p) {
    CompensatedSum<Complex> acc;
    const Complex* row = g.values.data() + p * tsize;
    for (std::size_t q = 0; q < tsize; ++q) acc.add(row[q] * phase[q]);
    out.values[p] = acc.value();
  }
  return PlaneFunction::grid(std::move(out));
}

GroupSamples evaluate(const SpectralGroupFunction& f, const std::vector<double>& radii,
                      const std::vector<double>& t_points, int radial_panels,
                      int sphere_resolution, std::uint64_t seed) {
  GroupSamples out = make_samples(f.n, f.m, radii, t_points);
  const QuadratureRule rq = composite_gauss_legendre(f.a_min, f.a_max, radial_panels);
  const SphereRule sr = sphere_rule(f.m, sphere_resolution, seed);
  const std::size_t nt = out.t_count();
  const double norm = std::pow(2.0 * kPi, -f.m);
  // angular[q * nt + j] = sum over the sphere at radius rq.nodes[q]
  std::vector<Complex> angular(rq.size() * nt);
  parallel_for(rq.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> a(f.m);
    for (std::size_t q = begin; q < end; ++q) {
      const double rho = rq.nodes[q];
      for (std::size_t v = 0; v < sr.size(); ++v) {
        const auto w = sr.node(v);
        for (int d = 0; d < f.m; ++d) a[d] = rho * w[d];
        const Complex amp = f.amplitude(a);
        if (amp == 0.0) continue;
        for (std::size_t j = 0; j < nt; ++j) {
          const auto t = out.t_point(j);
          double arg = 0.0;
          for (int d = 0; d < f.m; ++d) arg += a[d] * t[d];
          angular[q * nt + j] += sr.weights[v] * amp * std::polar(1.0, -arg);
        }
      }
    }
  });
  for (std::size_t i = 0; i < radii.size(); ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      CompensatedSum<Complex> acc;
      for (std::size_t q = 0; q < rq.size(); ++q) {
        const double rho = rq.nodes[q];
        acc.add(rq.weights[q] * std::pow(rho, f.m - 1) * f.profile(rho, radii[i]) *
                angular[q * nt + j]);
      }
      out.at(i, j) = norm * acc.value();
    }
  }
  return out;
}

GroupFunction sample_on_grid(const SpectralGroupFunction& f, const TensorGrid& grid,
                             int radial_panels, int sphere_resolution, std::uint64_t seed) {
  if (f.n != 1) throw BackendMismatch("grid sampling of group functions needs n = 1");
  if (grid.dims() != 2 + f.m) throw ShapeMismatch("grid does not match (n, m)");
  const Axis& ax = grid.axis(0);
  const Axis& ay = grid.axis(1);
  // distinct radii, keyed by the exact squared radius
  std::map<double, std::size_t> index;
  for (int i = 0; i < ax.count; ++i)
    for (int j = 0; j < ay.count; ++j) {
      const double x = ax.point(i), y = ay.point(j);
      index.emplace(x * x + y * y, 0);
    }
  std::vector<double> radii;
  for (auto& [r2, slot] : index) {
    slot = radii.size();
    radii.push_back(std::sqrt(r2));
  }
  std::size_t tsize = 1;
  for (int k = 0; k < f.m; ++k) tsize *= grid.axis(2 + k).count;
  std::vector<double> tp;
  for (std::size_t q = 0; q < tsize; ++q) {
    std::size_t rem = q;
    std::vector<double> t(f.m);
    for (int k = f.m - 1; k >= 0; --k) {
      const Axis& at = grid.axis(2 + k);
      t[k] = at.point(static_cast<int>(rem % at.count));
      rem /= at.count;
    }
    tp.insert(tp.end(), t.begin(), t.end());
  }
  const GroupSamples s = evaluate(f, radii, tp, radial_panels, sphere_resolution, seed);
  GridField out(grid);
  for (int i = 0; i < ax.count; ++i)
    for (int j = 0; j < ay.count; ++j) {
      const double x = ax.point(i), y = ay.point(j);
      const std::size_t r = index.at(x * x + y * y);
      Complex* row = out.values.data() + (static_cast<std::size_t>(i) * ay.count + j) * tsize;
      for (std::size_t q = 0; q < tsize; ++q) row[q] = s.at(r, q);
    }
  return GroupFunction::grid(1, f.m, std::move(out));
}

GroupFunction joint_eigenfunction_convolve(const HTypeGroup& group, const GroupFunction& f, int k,
                                           std::span<const double> a,
                                           const ConvolutionOptions& opts) {
  if (group.n() != f.n() || group.m() != f.m()) throw ShapeMismatch("group and function differ");
  if (k < 0) throw DomainError("degree must be non-negative");
  double rho = 0.0;
  for (double v : a) rho += v * v;
  rho = std::sqrt(rho);
  if (!(rho > 0)) throw DomainError("joint eigenfunctions need a != 0");
  if (f.backend() != GroupFunction::Backend::Grid || f.n() != 1) {
    throw BackendMismatch("joint eigenfunction convolution runs on the n = 1 grid backend");
  }
  const PlaneFunction fa = central_fourier(f, a);
  // For n = 1, B(a) = c J with |c| = |a|; c carries the orientation.
  const double signed_lambda = group.b_of(a)(1, 0);
  ConvolutionOptions co = opts;
  co.output_grid.reset();
  const GridField conv = hermite_project(fa, k, signed_lambda, co).grid_field();
  const GridField& g = f.grid_field();
  std::size_t tsize = 1;
  for (int d = 0; d < f.m(); ++d) tsize *= g.grid.axis(2 + d).count;
  GridField out(g.grid);
  for (std::size_t q = 0; q < tsize; ++q) {
    std::size_t rem = q;
    double arg = 0.0;
    for (int d = f.m() - 1; d >= 0; --d) {
      const Axis& at = g.grid.axis(2 + d);
      arg += a[d] * at.point(static_cast<int>(rem % at.count));
      rem /= at.count;
    }
    const Complex e = std::polar(1.0, -arg);
    for (std::size_t p = 0; p < conv.values.size(); ++p) out.values[p * tsize + q] = e * conv.values[p];
  }
  return GroupFunction::grid(1, f.m(), std::move(out));
}

}  // namespace htype
