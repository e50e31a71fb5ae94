#include "htype/joint_calculus.hpp"

#include <algorithm>
#include <cmath>

#include "htype/laguerre.hpp"
#include "htype/quadrature.hpp"
#include "htype/sphere.hpp"

namespace htype {

double GroupValues::norm() const {
  return on_grid ? l2_norm(grid) : std::sqrt(sample_norm2(samples));
}

void GroupValues::axpy(Complex a, const GroupValues& x) {
  if (on_grid != x.on_grid) throw BackendMismatch("mixing grid and sampled values");
  if (on_grid) {
    htype::axpy(a, x.grid, grid);
    return;
  }
  if (samples.values.size() != x.samples.values.size()) throw ShapeMismatch("sample sets differ");
  for (std::size_t q = 0; q < samples.values.size(); ++q) samples.values[q] += a * x.samples.values[q];
}

GroupValues GroupValues::zeros_like() const {
  GroupValues z = *this;
  if (on_grid) {
    std::fill(z.grid.values.begin(), z.grid.values.end(), Complex(0.0));
  } else {
    std::fill(z.samples.values.begin(), z.samples.values.end(), Complex(0.0));
  }
  return z;
}

double relative_error(const GroupValues& f, const GroupValues& reference) {
  GroupValues d = f;
  d.axpy(-1.0, reference);
  const double den = reference.norm();
  return den > 0.0 ? d.norm() / den : d.norm();
}

double laguerre_coefficient(const std::function<double(double)>& profile, int n, double lambda,
                            int k, double radius) {
  // phi_k^lambda turns about sqrt(lambda (2k + n)) times per unit radius
  const double phase = radius * std::sqrt(lambda * (2.0 * k + n));
  const int panels = 4 + static_cast<int>(std::ceil(phase / 6.0));
  const QuadratureRule rule = radial_rule(n, radius, panels);
  std::vector<double> seq(k + 1);
  CompensatedSum<double> ip;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double r = rule.nodes[i];
    laguerre_function_sequence(n, lambda, r * r, seq);
    ip.add(rule.weights[i] * profile(r) * seq[k]);
  }
  return ip.value() / laguerre_function_norm2(k, n, lambda);
}

namespace {

void check_mu(const SpectralProfile& h, double mu) {
  if (std::isnan(mu) || !h.contains(mu)) {
    throw DomainError("mu = " + std::to_string(mu) + " lies outside the profile's spectrum");
  }
}

// Extrapolated size of the omitted terms from the last few term norms.
double tail_estimate(const std::vector<double>& t, bool capped) {
  if (t.empty()) return 0.0;
  const double last = t.back();
  if (!capped) {
    double s = 0.0;
    for (std::size_t i = t.size() >= 3 ? t.size() - 3 : 0; i < t.size(); ++i) s += t[i];
    return s;
  }
  if (t.size() >= 2 && t[t.size() - 2] > 0.0) {
    const double q = last / t[t.size() - 2];
    if (q < 1.0) return last * q / (1.0 - q);
  }
  return last * static_cast<double>(t.size());
}

// sum_v w_v A(rho w_v) e^{-i rho <w_v, t_j>} for every sample t_j
std::vector<Complex> sphere_sums(const SpectralGroupFunction& f, const SphereRule& rule, double rho,
                                 const GroupSamples& layout) {
  const std::size_t nt = layout.t_count();
  std::vector<Complex> amp(rule.size());
  std::vector<double> a(f.m);
  for (std::size_t v = 0; v < rule.size(); ++v) {
    const auto w = rule.node(v);
    for (int d = 0; d < f.m; ++d) a[d] = rho * w[d];
    amp[v] = rule.weights[v] * f.amplitude(a);
  }
  std::vector<Complex> out(nt);
  parallel_for(nt, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto t = layout.t_point(j);
      CompensatedSum<Complex> acc;
      for (std::size_t v = 0; v < rule.size(); ++v) {
        if (amp[v] == 0.0) continue;
        const auto w = rule.node(v);
        double arg = 0.0;
        for (int d = 0; d < f.m; ++d) arg += w[d] * t[d];
        acc.add(amp[v] * std::polar(1.0, -rho * arg));
      }
      out[j] = acc.value();
    }
  });
  return out;
}

struct KRule {
  int max_k;
  double tol;
  int patience;
  int quiet = 0;
  double accumulated2 = 0.0;

  // true when the sum may stop after a term of squared norm t2
  bool done(double t2) {
    accumulated2 += t2;
    if (accumulated2 <= 0.0) return false;
    quiet = std::sqrt(t2) < tol * std::sqrt(accumulated2) ? quiet + 1 : 0;
    return quiet >= patience;
  }
};

ProjectionResult restrict_spectral(const HTypeGroup& group, const SpectralProfile& profile,
                                   const SpectralGroupFunction& f, double mu,
                                   const SampleLayout& layout, const RestrictionOptions& opts) {
  const int n = f.n, m = f.m;
  if (group.n() != n || group.m() != m) throw ShapeMismatch("group and function differ");
  ProjectionResult res;
  res.values.samples = make_samples(n, m, layout.radii, layout.t_points);
  GroupValues diff = res.values;
  const std::size_t nr = layout.radii.size();
  const std::size_t nt = res.values.samples.t_count();
  const SphereRule coarse =
      sphere_rule(m, m >= 4 ? opts.qmc_points : opts.sphere_resolution, opts.seed);
  const SphereRule fine = refine(coarse);
  res.sphere_nodes = fine.size();
  const bool doubled = m > 1;
  const double norm = std::pow(2.0 * kPi, -(n + m));
  // radial trapezoid weights of the layout, for term norms
  GroupSamples unit = make_samples(n, m, layout.radii, {std::vector<double>(m, 0.0)});
  KRule rule{opts.max_k, opts.k_tolerance, opts.patience};
  bool capped = true;
  double guess = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k <= opts.max_k; ++k) {
    const LambdaSolution sol = lambda_solve_at(profile, 2.0 * k + n, mu, guess);
    const double rho = sol.lambda;
    res.k_used = k + 1;
    // lambda_k decreases in k, so nothing further can reach the support
    if (rho < f.a_min) {
      capped = false;
      res.term_norms.push_back(0.0);
      break;
    }
    if (rho > f.a_max) {
      res.term_norms.push_back(0.0);
      continue;
    }
    const double wk = norm * std::pow(rho, n + m - 1) * std::abs(sol.dlambda);
    auto prof = [&](double r) { return f.profile(rho, r); };
    const double ck = laguerre_coefficient(prof, n, rho, k, f.radius_at(rho));
    const double conv = wk * std::pow(2.0 * kPi / rho, n) * ck;
    std::vector<double> radial(nr);
    for (std::size_t i = 0; i < nr; ++i) {
      radial[i] = conv * laguerre_function(k, n, rho, layout.radii[i] * layout.radii[i]);
    }
    const std::vector<Complex> s_fine = sphere_sums(f, fine, rho, res.values.samples);
    std::vector<Complex> s_coarse;
    if (doubled) s_coarse = sphere_sums(f, coarse, rho, res.values.samples);
    double sn2 = 0.0;
    for (std::size_t j = 0; j < nt; ++j) sn2 += std::norm(s_fine[j]);
    for (std::size_t i = 0; i < nr; ++i) {
      unit.at(i, 0) = radial[i];
      for (std::size_t j = 0; j < nt; ++j) {
        res.values.samples.at(i, j) += radial[i] * s_fine[j];
        if (doubled) diff.samples.at(i, j) += radial[i] * (s_fine[j] - s_coarse[j]);
      }
    }
    const double t2 = sample_norm2(unit) * sn2;
    res.term_norms.push_back(std::sqrt(t2));
    guess = rho;
    if (rule.done(t2)) {
      capped = false;
      break;
    }
  }
  const double out_norm = res.values.norm();
  const double scale = out_norm > 0.0 ? out_norm : 1.0;
  res.k_tail_estimate = tail_estimate(res.term_norms, capped) / scale;
  res.sphere_residual = doubled ? diff.norm() / scale : 0.0;
  if (res.sphere_residual > opts.sphere_tolerance) {
    throw QuadratureError("sphere rule changes the projection by " +
                          std::to_string(res.sphere_residual) + " under node doubling");
  }
  return res;
}

ProjectionResult restrict_grid(const HTypeGroup& group, const SpectralProfile& profile,
                               const GroupFunction& f, double mu, const RestrictionOptions& opts) {
  if (f.n() != 1 || f.m() != 1) throw BackendMismatch("grid projections need n = 1, m = 1");
  if (group.n() != 1 || group.m() != 1) throw ShapeMismatch("group and function differ");
  const GridField& g = f.grid_field();
  ProjectionResult res;
  res.values.on_grid = true;
  res.values.grid = GridField(g.grid);
  res.sphere_nodes = 2;
  const Axis& at = g.grid.axis(2);
  KRule rule{opts.max_k, opts.k_tolerance, opts.patience};
  bool capped = true;
  ConvolutionOptions co = opts.convolution;
  co.output_grid.reset();
  const double norm = std::pow(2.0 * kPi, -2);
  for (int k = 0; k <= opts.max_k; ++k) {
    const LambdaSolution sol = lambda_solve(profile, k, 1, mu);
    const double rho = sol.lambda;
    const double wk = norm * rho * std::abs(sol.dlambda);
    GridField term(g.grid);
    for (double side : {1.0, -1.0}) {
      const double a[1] = {side * rho};
      const PlaneFunction fa = central_fourier(f, a);
      if (l2_norm(fa.grid_field()) == 0.0) continue;
      const GridField conv = hermite_project(fa, k, group.b_of(a)(1, 0), co).grid_field();
      for (std::size_t p = 0; p < conv.values.size(); ++p)
        for (int q = 0; q < at.count; ++q) {
          term.values[p * at.count + q] += wk * std::polar(1.0, -a[0] * at.point(q)) * conv.values[p];
        }
    }
    axpy(1.0, term, res.values.grid);
    const double tn = l2_norm(term);
    res.term_norms.push_back(tn);
    res.k_used = k + 1;
    if (rule.done(tn * tn)) {
      capped = false;
      break;
    }
  }
  const double out_norm = res.values.norm();
  res.k_tail_estimate = tail_estimate(res.term_norms, capped) / (out_norm > 0.0 ? out_norm : 1.0);
  return res;
}

}  // namespace

ProjectionResult restriction_apply(const HTypeGroup& group, const SpectralProfile& profile,
                                   const GroupFunction& f, double mu, const SampleLayout& layout,
                                   const RestrictionOptions& opts) {
  check_mu(profile, mu);
  if (opts.max_k < 0 || opts.patience < 1) throw DomainError("invalid k-cap settings");
  if (f.backend() == GroupFunction::Backend::Grid) return restrict_grid(group, profile, f, mu, opts);
  return restrict_spectral(group, profile, f.spectral_form(), mu, layout, opts);
}

CalculusTable restriction_table(const HTypeGroup& group, const SpectralProfile& profile,
                                const GroupFunction& f, const SampleLayout& layout,
                                const CalculusOptions& opts) {
  if (opts.intervals < 2 || opts.intervals % 2 != 0) {
    throw DomainError("Simpson needs an even positive interval count");
  }
  auto project = [&](double mu) {
    return restriction_apply(group, profile, f, mu, layout, opts.restriction);
  };
  CalculusTable table;
  double lo = opts.mu_lo, hi = opts.mu_hi;
  if (std::isnan(lo) || std::isnan(hi)) {
    const double a = std::max(profile.lower(), 1e-8);
    const double b = std::isfinite(profile.upper()) ? profile.upper() * (1.0 - 1e-9) : 1e8;
    const int count = std::max(opts.scan_points, 3);
    std::vector<double> grid(count), norms(count);
    for (int i = 0; i < count; ++i) {
      grid[i] = a * std::pow(b / a, static_cast<double>(i) / (count - 1));
      norms[i] = project(grid[i]).values.norm();
    }
    const double peak = *std::max_element(norms.begin(), norms.end());
    if (!(peak > 0)) throw DomainError("the input has no spectral mass on the scanned range");
    int first = count, last = -1;
    for (int i = 0; i < count; ++i) {
      if (norms[i] >= opts.support_tolerance * peak) {
        first = std::min(first, i);
        last = std::max(last, i);
      }
    }
    if (std::isnan(lo)) lo = grid[std::max(first - 1, 0)];
    if (std::isnan(hi)) hi = grid[std::min(last + 1, count - 1)];
  }
  if (!(lo > 0) || !(hi > lo) || !profile.contains(lo) || !profile.contains(hi)) {
    throw DomainError("invalid mu-range for the calculus");
  }
  table.mu_lo = lo;
  table.mu_hi = hi;
  const double step = std::log(hi / lo) / opts.intervals;
  for (int i = 0; i <= opts.intervals; ++i) {
    const double mu = lo * std::exp(step * i);
    const double simpson = (i == 0 || i == opts.intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    table.mu.push_back(mu);
    table.weights.push_back(simpson * step / 3.0 * mu);
    table.projections.push_back(project(mu));
  }
  return table;
}

GroupValues integrate_symbol(const CalculusTable& table, const std::function<double(double)>& H) {
  if (table.projections.empty()) throw DomainError("empty calculus table");
  GroupValues out = table.projections.front().values.zeros_like();
  for (std::size_t i = 0; i < table.mu.size(); ++i) {
    const double w = table.weights[i] * H(table.mu[i]);
    if (w != 0.0) out.axpy(w, table.projections[i].values);
  }
  return out;
}

GroupValues calculus_apply(const HTypeGroup& group, const SpectralProfile& profile,
                           const std::function<double(double)>& H, const GroupFunction& f,
                           const SampleLayout& layout, const CalculusOptions& opts) {
  return integrate_symbol(restriction_table(group, profile, f, layout, opts), H);
}

GroupValues sample_input(const GroupFunction& f, const SampleLayout& layout) {
  GroupValues v;
  if (f.backend() == GroupFunction::Backend::Grid) {
    v.on_grid = true;
    v.grid = f.grid_field();
    return v;
  }
  const SpectralGroupFunction& s = f.spectral_form();
  v.samples = evaluate(s, layout.radii, layout.t_points, 64, 32);
  return v;
}

}  // namespace htype
