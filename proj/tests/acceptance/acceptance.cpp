// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "htype/cli.hpp"
#include "htype/estimate.hpp"
#include "htype/grid.hpp"
#include "htype/group.hpp"
#include "htype/group_function.hpp"
#include "htype/hermite.hpp"
#include "htype/io.hpp"
#include "htype/joint_calculus.hpp"
#include "htype/laguerre.hpp"
#include "htype/profile.hpp"
#include "htype/sharpness.hpp"

using namespace htype;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  double seconds = -1.0;  // timed portion; whole criterion when negative
  double budget = 0.0;    // runtime limit in seconds, 0 for none
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// ---- AC1 ----

Outcome group_validity() {
  Outcome o;
  o.budget = 1.0;
  const auto t0 = Clock::now();
  double worst = 0.0, worst_b = 0.0;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (auto [m, n] : {std::pair{1, 1}, std::pair{3, 2}, std::pair{7, 4}}) {
    const HTypeGroup g = build_htype_group(m, n);
    worst = std::max(worst, verify_htype_conditions(g).max_violation());
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> a(m);
      double s = 0.0;
      for (double& x : a) s += (x = normal(rng)) * x;
      for (double& x : a) x /= std::sqrt(s);
      const Matrix b = g.b_of(a);
      const int d = b.rows();
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          double e = 0.0;
          for (int k = 0; k < d; ++k) e += b(k, i) * b(k, j);
          worst_b = std::max(worst_b, std::abs(e - (i == j ? 1.0 : 0.0)));
        }
      }
    }
  }
  o.seconds = since(t0);
  o.pass = worst <= 1e-12 && worst_b <= 1e-12 && o.seconds < o.budget;
  o.detail = "max violation " + fmt(worst) + ", B(a) orthogonality " + fmt(worst_b);
  return o;
}

// ---- AC2 ----

using Big = boost::multiprecision::cpp_bin_float_100;

Big laguerre_series(int k, int a, double x) {
  Big sum = 0, term_x = 1;
  for (int i = 0; i <= k; ++i) {
    Big binom = 1;
    for (int j = 1; j <= k - i; ++j) binom = binom * Big(a + i + j) / Big(j);
    const Big t = binom * term_x;
    sum += (i % 2 == 0) ? t : Big(-t);
    term_x = term_x * Big(x) / Big(i + 1);
  }
  return sum;
}

Outcome laguerre_accuracy() {
  Outcome o;
  o.budget = 1.0;
  std::vector<double> xs;
  for (double x = 0.0; x <= 100.0; x += 1.37) xs.push_back(x);
  xs.push_back(100.0);
  // library values first (timed), then the extended-precision oracle
  std::vector<std::vector<double>> values;
  const auto t0 = Clock::now();
  for (int a = 0; a <= 7; ++a) {
    for (double x : xs) {
      std::vector<double> seq(51);
      laguerre_sequence(a, x, seq);
      values.push_back(std::move(seq));
    }
  }
  o.seconds = since(t0);
  double worst = 0.0;
  std::size_t row = 0;
  for (int a = 0; a <= 7; ++a) {
    for (double x : xs) {
      const std::vector<double>& seq = values[row++];
      for (int k = 0; k <= 50; ++k) {
        const double ref = static_cast<double>(laguerre_series(k, a, x));
        worst = std::max(worst, std::abs(seq[k] - ref) / std::abs(ref));
      }
    }
  }
  o.pass = worst <= 1e-10 && o.seconds < o.budget;
  o.detail = "max relative error " + fmt(worst) + " over k <= 50, order <= 7, x in [0, 100]";
  return o;
}

// ---- AC3 ----

Outcome expansion_plancherel() {
  Outcome o;
  o.budget = 30.0;
  const PlaneFunction f = PlaneFunction::gaussian(1, 1.0);
  double worst_rec = 0.0, worst_gap = 0.0;
  for (double lambda : {1.0, 2.0}) {
    const Reconstruction rec = reconstruct(f, lambda, -1);
    const PlaneFunction& s = rec.partial_sum;
    const TensorGrid grid = s.backend() == PlaneFunction::Backend::Grid ? s.grid_field().grid : plane_grid();
    worst_rec = std::max(worst_rec, relative_l2_error(to_grid(s, grid).grid_field(), to_grid(f, grid).grid_field()));
    worst_gap = std::max(worst_gap, plancherel_check(f, lambda, -1).gap);
  }
  o.pass = worst_rec <= 1e-6 && worst_gap <= 1e-6;
  o.detail = "reconstruction error " + fmt(worst_rec) + ", Plancherel gap " + fmt(worst_gap) +
             ", normalization 2 pi / lambda^n from phi_0 x phi_0 = " + fmt(plancherel_normalization().reproducing_constant);
  return o;
}

// ---- AC4 ----

Outcome eigen_relations() {
  Outcome o;
  o.budget = 60.0;
  const auto t0 = Clock::now();
  // L_lambda (f x_lambda phi_k) = (2k+n) lambda (f x_lambda phi_k), f a non-radial Gaussian
  const double lambda = 1.0;
  AnalyticPlane ap;
  ap.n = 1;
  ap.value = [](std::span<const double> z) {
    return Complex(1.0 + 0.5 * z[0], 0.3 * z[1]) * std::exp(-(z[0] * z[0] + z[1] * z[1]) / 2.0);
  };
  const PlaneFunction f = PlaneFunction::analytic(ap);
  ConvolutionOptions wide;
  wide.default_grid = plane_grid(160, 12.0);
  double worst = 0.0;
  for (int k = 0; k <= 5; ++k) {
    const PlaneFunction fk = hermite_project(f, k, lambda, wide);
    const GridField& u = fk.grid_field();
    const GridField lu = twisted_laplacian_apply(fk, lambda, 1e-3).grid_field();
    worst = std::max(worst, relative_l2_error(lu, scaled(u, (2.0 * k + 1.0) * lambda)));
  }
  // L (e^{-i<a,t>} phi) = e^{-i<a,t>} L_|a| phi on the reference grid
  const HTypeGroup g = build_htype_group(1, 1);
  const TensorGrid grid = group_grid(g, 64, 8.0, 64, 16.0);
  const double a = 2.0 * kPi * 6.0 / 32.0;  // a t-grid frequency
  const TensorGrid plane = plane_grid(64, 8.0);
  const GridField lphi = to_grid(twisted_laplacian_apply(to_grid(f, plane), a), plane).grid_field();
  const GridField wave = sample_field(grid, [&](std::span<const double> p) {
    return std::polar(1.0, -a * p[2]) * f(p.first(2));
  });
  const GridField lwave = apply_operator(g, GroupOperator::sublaplacian(), wave, 1e-3);
  const Axis& ax = plane.axis(0);
  const GridField ref = sample_field(grid, [&](std::span<const double> p) {
    const auto i = static_cast<std::size_t>(std::lround((p[0] - ax.point(0)) / (ax.point(1) - ax.point(0))));
    const auto j = static_cast<std::size_t>(std::lround((p[1] - ax.point(0)) / (ax.point(1) - ax.point(0))));
    return std::polar(1.0, -a * p[2]) * lphi.values[i * ax.count + j];
  });
  const double inter = relative_l2_error(lwave, ref);
  o.seconds = since(t0);
  o.pass = worst <= 1e-3 && inter <= 1e-3 && o.seconds < o.budget;
  o.detail = "eigen residual " + fmt(worst) + " (k <= 5), intertwining residual " + fmt(inter);
  return o;
}

// ---- AC5 ----

Outcome scaling_law() {
  Outcome o;
  const AnalyticPlane f = PlaneFunction::gaussian(1, 0.5).closed_form();
  ScalingOptions opts;
  opts.allow_outside_range = true;  // p = 6/5 lies beyond the n = 1 estimate range
  double worst = 0.0;
  for (double lambda : {0.25, 1.0, 4.0, 9.0}) {
    for (double p : {1.0, 1.2}) {
      const ScalingReport r = projection_scaling_probe(f, 0, lambda, p, opts);
      const double expected = std::pow(lambda, 1.0 / p - 1.5);
      worst = std::max(worst, std::max(r.relative_error, std::abs(r.expected - expected) / expected));
    }
  }
  o.pass = worst <= 1e-6;
  o.detail = "max relative deviation from lambda^{n(1/p-3/2)}: " + fmt(worst);
  return o;
}

// ---- AC6 ----

Outcome lambda_solver() {
  Outcome o;
  o.budget = 5.0;
  const auto t0 = Clock::now();
  const std::vector<SpectralProfile> families{
      SpectralProfile::sum(1, 1),         SpectralProfile::sum(2, 1),
      SpectralProfile::sum(1, 2),         SpectralProfile::sum(2, 0.5),
      SpectralProfile::power(1, 1, 0.5),  SpectralProfile::power(1, 1, 2),
      SpectralProfile::inverse_power(1, 1, 0.5), SpectralProfile::inverse_power(1, 1, 2),
      SpectralProfile::resolvent(),       SpectralProfile::shifted(1, 1, 2),
      SpectralProfile::xi(),              SpectralProfile::delta()};
  double worst_res = 0.0, worst_der = 0.0;
  for (const SpectralProfile& h : families) {
    std::vector<double> mus;
    if (std::isinf(h.upper())) {
      for (int e = -7; e <= 7; ++e) mus.push_back(1.37 * std::pow(10.0, e));
    } else {
      for (int e = 1; e <= 7; ++e) {
        mus.push_back(std::pow(10.0, -e));
        mus.push_back(1.0 - std::pow(10.0, -e));
      }
    }
    for (int n : {1, 4}) {
      for (int k = 0; k <= 100; ++k) {
        const double s = 2.0 * k + n;
        for (double mu : mus) {
          const LambdaSolution sol = lambda_solve(h, k, n, mu);
          worst_res = std::max(worst_res, std::abs(h(s * sol.lambda, sol.lambda * sol.lambda) - mu) / std::max(1.0, mu));
          const double d = 1e-5 * std::min(mu, h.upper() - mu);
          const double up = mu + d, down = mu - d;
          const double fd = (lambda_solve(h, k, n, up).lambda - lambda_solve(h, k, n, down).lambda) / (up - down);
          worst_der = std::max(worst_der, std::abs(fd - sol.dlambda) / std::abs(sol.dlambda));
        }
      }
    }
  }
  double worst_delta = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const LambdaSolution s = lambda_solve(SpectralProfile::delta(), 0, n, 2.0 * n * n);
    worst_delta = std::max({worst_delta, std::abs(s.lambda - n) / n, std::abs(s.dlambda - 1.0 / (3.0 * n)) * 3.0 * n});
  }
  o.seconds = since(t0);
  o.pass = worst_res <= 1e-12 && worst_der <= 1e-6 && worst_delta <= 1e-12 && o.seconds < o.budget;
  o.detail = "residual " + fmt(worst_res) + ", derivative " + fmt(worst_der) + ", delta at 2n^2 " + fmt(worst_delta);
  return o;
}

// ---- AC7 ----

Outcome exponent_matrix() {
  Outcome o;
  o.budget = 600.0;
  const auto t0 = Clock::now();
  const std::vector<SpectralProfile> families{
      SpectralProfile::sum(1, 1),         SpectralProfile::sum(2, 1),
      SpectralProfile::sum(1, 2),         SpectralProfile::sum(2, 0.5),
      SpectralProfile::power(1, 1, 0.5),  SpectralProfile::power(1, 1, 2),
      SpectralProfile::inverse_power(1, 1, 0.5), SpectralProfile::inverse_power(1, 1, 2),
      SpectralProfile::resolvent(),       SpectralProfile::shifted(1, 1, 2),
      SpectralProfile::xi(),              SpectralProfile::delta()};
  int entries = 0, failed = 0;
  double worst = 0.0;
  std::string worst_entry;
  for (const SpectralProfile& h : families) {
    for (auto [n, m] : {std::pair{2, 3}, std::pair{4, 7}}) {
      for (double p : {1.0, (2.0 * m + 2.0) / (m + 3.0)}) {
        for (Regime r : regimes_for(h)) {
          ++entries;
          std::string entry = h.to_string() + " (" + std::to_string(n) + "," + std::to_string(m) + ") p=" +
                              fmt(p) + " " + to_string(r);
          double diff = 1e300;
          try {
            const ConstantCurve c = constant_curve(h, p, n, m, regime_window(h, r));
            diff = std::abs(fit_exponent(c, r).slope - predicted_exponent(h, r, p, n, m).exponent);
          } catch (const std::exception& e) {
            entry += ": " + std::string(e.what());
          }
          if (!(diff <= 0.05)) {
            ++failed;
            std::printf("  AC7 entry out of tolerance: %s, |fitted - predicted| = %s\n", entry.c_str(), fmt(diff).c_str());
          }
          if (diff > worst) {
            worst = diff;
            worst_entry = entry;
          }
        }
      }
    }
  }
  o.seconds = since(t0);
  o.pass = failed == 0 && o.seconds < o.budget;
  o.detail = std::to_string(entries - failed) + "/" + std::to_string(entries) +
             " entries within 0.05; largest deviation " + fmt(worst) + " at " + worst_entry;
  return o;
}

// ---- AC8 ----

Outcome sum_bounds() {
  Outcome o;
  std::vector<double> A;
  for (int i = 0; i <= 40; ++i) A.push_back(10.0 * std::pow(1e4, i / 40.0));
  bool bounded = true;
  std::string ratios;
  for (double nu : {-1.5, -2.0, -3.0, 0.0, 0.5, 1.0}) {
    const SumBoundReport r = sum_bound_check(nu, 1, A);
    bounded = bounded && r.bounded;
    ratios += (ratios.empty() ? "" : ", ") + fmt(nu) + ": " + fmt(r.max_ratio);
  }
  // head-form limits against counting: sum of the first c odd numbers is c^2,
  // and there are c = floor((A-1)/2) + 1 of them up to A
  const double big = 1e5;
  const double c = std::floor((big - 1.0) / 2.0) + 1.0;
  const SumBoundReport one = sum_bound_check(1.0, 1, {big});
  const SumBoundReport zero = sum_bound_check(0.0, 1, {big});
  const double e1 = std::abs(one.sums[0] - c * c) / (c * c) + std::abs(one.ratios[0] - 0.25);
  const double e0 = std::abs(zero.sums[0] - c) / c + std::abs(zero.ratios[0] - 0.5);
  o.pass = bounded && e1 <= 1e-3 && e0 <= 1e-3;
  o.detail = "max ratios {" + ratios + "}; nu=1 limit error " + fmt(e1) + ", nu=0 limit error " + fmt(e0);
  return o;
}

// ---- AC9 ----

Outcome sharpness_identity() {
  Outcome o;
  o.budget = 600.0;
  const auto t0 = Clock::now();
  const int n = 2, m = 3;
  const SharpnessGrid grid;
  const SharpnessInstance inst = build_sharpness_instance(n, m, default_knots(n), random_gaussian_seed(m, 1));
  const SharpnessReport rep = verify_sharpness_identity(inst, grid);
  const SharpnessReport fine = verify_sharpness_identity(inst, grid.doubled());
  const double p = (2.0 * m + 2.0) / (m + 3.0);
  const double q = p / (p - 1.0);
  double lo = 1e300, hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SharpnessReport r =
        verify_sharpness_identity(build_sharpness_instance(n, m, default_knots(n), random_gaussian_seed(m, seed)), grid);
    const double ratio = sharpness_norm_ratio(r, q);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const double spread = (hi - lo) / lo;
  o.seconds = since(t0);
  o.pass = rep.gap <= 1e-3 && fine.gap <= 0.5 * rep.gap && spread <= 1e-3 && o.seconds < o.budget;
  o.detail = "gap " + fmt(rep.gap) + ", doubled grid " + fmt(fine.gap) + ", norm-ratio spread over 5 seeds " + fmt(spread);
  return o;
}

// ---- AC10 ----

Outcome spectral_inversion() {
  Outcome o;
  const HTypeGroup group = build_htype_group(1, 1);
  const GroupFunction f = GroupFunction::spectral(gaussian_group_function(1, 1));
  SampleLayout layout;
  for (int i = 0; i <= 32; ++i) layout.radii.push_back(0.25 * i);
  for (int j = 0; j < 9; ++j) layout.t_points.push_back(-4.0 + j);
  CalculusOptions co;
  co.intervals = 128;
  co.restriction.max_k = 500;
  const GroupValues out = calculus_apply(group, SpectralProfile::delta(), [](double) { return 1.0; }, f, layout, co);
  const double err = relative_error(out, sample_input(f, layout));
  o.pass = err <= 1e-2;
  o.detail = "relative L2 error " + fmt(err) + " on |z| <= 8, |t| <= 4 (delta profile, 128 log-mu intervals)";
  return o;
}

// ---- AC11 ----

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "htype");
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

Outcome reproducibility() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("htype_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto file = [&](const std::string& name) { return (dir / name).string(); };
  // each command with the artifact its manifest is named after
  const std::vector<std::pair<std::vector<std::string>, std::string>> commands{
      {{"group", "build", "--m", "7", "--n", "4", "--out", file("g.json")}, file("g.json")},
      {{"constant", "--profile", "sum:alpha=1,beta=2", "--p", "1", "--n", "2", "--m", "3", "--mu",
        "log:1e3:1e7:9", "--out", file("c.csv")},
       file("c.csv")},
      {{"hermite", "plancherel", "--lambda", "2", "--out", file("pl.json")}, file("pl.json")},
      {{"sharpness", "--n", "2", "--m", "3", "--seed", "4", "--out", file("s.json"), "--samples", file("s.htsamp")},
       file("s.json")},
  };
  int compared = 0, differing = 0;
  bool ran = true;
  for (const auto& [args, primary] : commands) {
    ran = ran && run_cli(args) == cli::kExitOk;
    const std::string manifest = primary + ".manifest.json";
    const Json man = Json::parse(read_text(manifest));
    std::vector<std::string> first;
    for (const auto& out : man.at("outputs")) first.push_back(read_text(out.at("path").get<std::string>()));
    ran = ran && run_cli({"replay", manifest}) == cli::kExitOk;
    std::size_t i = 0;
    for (const auto& out : man.at("outputs")) {
      ++compared;
      if (read_text(out.at("path").get<std::string>()) != first[i++]) ++differing;
    }
  }
  fs::remove_all(dir);
  o.pass = ran && compared > 0 && differing == 0;
  o.detail = std::to_string(compared) + " artifacts from " + std::to_string(commands.size()) +
             " manifests replayed, " + std::to_string(differing) + " differ";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"group validity", group_validity},
      {"Laguerre accuracy", laguerre_accuracy},
      {"expansion and Plancherel", expansion_plancherel},
      {"eigen-relations", eigen_relations},
      {"dilation law", scaling_law},
      {"lambda solver", lambda_solver},
      {"exponent reproduction", exponent_matrix},
      {"sum bounds", sum_bounds},
      {"sharpness identity", sharpness_identity},
      {"spectral inversion", spectral_inversion},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double total = since(t0);
    const double timed = o.seconds >= 0.0 ? o.seconds : total;
    if (o.budget > 0.0 && !(timed < o.budget)) o.pass = false;
    std::string timing = fmt(total) + " s";
    if (o.seconds >= 0.0 && std::abs(o.seconds - total) > 1e-3) timing += ", timed part " + fmt(o.seconds) + " s";
    if (o.budget > 0.0) timing += ", limit " + fmt(o.budget) + " s";
    std::printf("AC%zu %s %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
