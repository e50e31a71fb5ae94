#include "htype/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "htype/common.hpp"
#include "htype/estimate.hpp"
#include "htype/group.hpp"
#include "htype/group_function.hpp"
#include "htype/hermite.hpp"
#include "htype/io.hpp"
#include "htype/joint_calculus.hpp"
#include "htype/profile.hpp"
#include "htype/sharpness.hpp"

namespace htype::cli {

namespace {

/// A computed quantity missed the tolerance the user asked for.
class ToleranceExceeded : public Error {
 public:
  using Error::Error;
};

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const QuadratureError*>(&e) || dynamic_cast<const TruncationError*>(&e) ||
      dynamic_cast<const NoBracket*>(&e) || dynamic_cast<const AliasingError*>(&e) ||
      dynamic_cast<const GridTooCoarse*>(&e) || dynamic_cast<const ToleranceExceeded*>(&e)) {
    return kExitNumerical;
  }
  return kExitValidation;
}

/// What one invocation did, for its manifest.
struct RunRecord {
  std::string command;
  std::vector<std::string> arguments;  // argv without the program name
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
  /// Parameters later commands read back from the manifest.
  Json config = Json::object();
};

void write_manifest(const RunRecord& rec, double wall_seconds) {
  if (rec.outputs.empty()) return;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "htype";
  j["tool_version"] = kToolVersion;
  j["command"] = rec.command;
  j["arguments"] = rec.arguments;
  j["seeds"] = rec.seeds;
  j["config"] = rec.config;
  Json outs = Json::array();
  for (const std::string& path : rec.outputs) {
    outs.push_back({{"path", path},
                    {"bytes", std::filesystem::file_size(path)},
                    {"fnv1a64", file_digest(path)}});
  }
  j["outputs"] = outs;
  j["wall_time_seconds"] = wall_seconds;
  write_text(rec.outputs.front() + ".manifest.json", j.dump(2) + "\n");
}

/// Writes a JSON report to `path` (recorded as an output) or to `out`.
void emit(const Json& report, const std::string& path, RunRecord& rec, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
    rec.outputs.push_back(path);
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

void check_p(double p) { require(p >= 1.0 && p <= 2.0, "--p must lie in [1, 2]"); }

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return v;
}

}  // namespace

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

namespace {

struct Context {
  RunRecord& rec;
  std::ostream& out;
  std::ostream& err;
};

using Action = std::function<void(Context&)>;

// ---- group ----

struct GroupOptions {
  int m = 1;
  int n = 1;
  std::string file;
  std::string out;
  double tolerance = 1e-12;
};

void add_group(CLI::App& app, Action& action) {
  auto* grp = app.add_subcommand("group", "Build or verify H-type bracket matrices");
  grp->require_subcommand(1);
  auto o = std::make_shared<GroupOptions>();

  auto* build = grp->add_subcommand("build", "Write U^1..U^m for a supported (m, n) as JSON");
  build->add_option("--m", o->m, "Center dimension")->required();
  build->add_option("--n", o->n, "Half the dimension of the first layer")->required();
  build->add_option("--out", o->out, "Output JSON")->required();
  build->callback([o, &action] {
    action = [o](Context& c) {
      require(o->m >= 1 && o->n >= 1, "--m and --n must be positive");
      write_text(o->out, group_to_json(build_htype_group(o->m, o->n)).dump(2) + "\n");
      c.rec.outputs.push_back(o->out);
    };
  });

  auto* verify = grp->add_subcommand("verify", "Check skewness, orthogonality and anticommutation");
  verify->add_option("file", o->file, "Group JSON")->required();
  verify->add_option("--tolerance", o->tolerance, "Largest allowed violation")->capture_default_str();
  verify->add_option("--out", o->out, "Report JSON (stdout when omitted)");
  verify->callback([o, &action] {
    action = [o](Context& c) {
      require(o->tolerance > 0, "--tolerance must be positive");
      Json in;
      try {
        in = Json::parse(read_text(o->file));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(o->file + ": " + e.what());
      }
      const HTypeGroup g = group_from_json(in);
      const HTypeVerification v = verify_htype_conditions(g, o->tolerance);
      Json r;
      r["schema_version"] = kSchemaVersion;
      r["n"] = g.n();
      r["m"] = g.m();
      r["skewness"] = v.skewness;
      r["orthogonality"] = v.orthogonality;
      r["anticommutation"] = v.anticommutation;
      r["complex_structure"] = v.complex_structure;
      r["max_violation"] = v.max_violation();
      r["tolerance"] = v.tolerance;
      r["passed"] = v.passed();
      emit(r, o->out, c.rec, c.out);
      if (!v.passed()) throw ToleranceExceeded("max violation " + format_double(v.max_violation()));
    };
  });
}

// ---- hermite ----

struct HermiteOptions {
  int n = 1;
  double lambda = 1.0;
  double a = 0.5;
  int k_max = -1;
  int k = 0;
  double p = 1.0;
  int count = 96;
  double extent = 8.0;
  bool allow_outside = false;
  double tolerance = 1e-6;
  std::string out;
};

void add_hermite(CLI::App& app, Action& action) {
  auto* her = app.add_subcommand("hermite", "Special Hermite expansion checks on exp(-a|z|^2)");
  her->require_subcommand(1);
  auto o = std::make_shared<HermiteOptions>();

  auto* pl = her->add_subcommand("plancherel", "Compare ||f||^2 with the weighted sum of ||f x phi_k||^2");
  pl->add_option("--n", o->n, "Complex dimension")->capture_default_str();
  pl->add_option("--lambda", o->lambda, "Twist parameter")->capture_default_str();
  pl->add_option("--a", o->a, "Gaussian exponent")->capture_default_str();
  pl->add_option("--k-max", o->k_max, "Last k (negative: tail rule)")->capture_default_str();
  pl->add_option("--count", o->count, "Grid points per axis")->capture_default_str();
  pl->add_option("--extent", o->extent, "Grid half extent")->capture_default_str();
  pl->add_option("--tolerance", o->tolerance, "Largest allowed gap")->capture_default_str();
  pl->add_option("--out", o->out, "Report JSON (stdout when omitted)");
  pl->callback([o, &action] {
    action = [o](Context& c) {
      require(o->n >= 1, "--n must be positive");
      require(o->lambda > 0 && o->a > 0, "--lambda and --a must be positive");
      require(o->count >= 8 && o->extent > 0, "grid needs --count >= 8 and --extent > 0");
      ReconstructOptions ro;
      ro.convolution.default_grid = plane_grid(o->count, o->extent);
      const PlancherelReport r = plancherel_check(PlaneFunction::gaussian(o->n, o->a), o->lambda, o->k_max, ro);
      Json j;
      j["schema_version"] = kSchemaVersion;
      j["n"] = o->n;
      j["lambda"] = o->lambda;
      j["a"] = o->a;
      j["lhs"] = r.lhs;
      j["rhs"] = r.rhs;
      j["gap"] = r.gap;
      j["terms"] = r.terms;
      j["exponent_per_n"] = r.exponent_per_n;
      emit(j, o->out, c.rec, c.out);
      if (!(r.gap <= o->tolerance)) throw ToleranceExceeded("Plancherel gap " + format_double(r.gap));
    };
  });

  auto* sc = her->add_subcommand("scaling", "Dilation law of ||f x phi_k|| / ||f||_p (n = 1)");
  sc->add_option("--k", o->k, "Laguerre index")->capture_default_str();
  sc->add_option("--lambda", o->lambda, "Dilation")->capture_default_str();
  sc->add_option("--p", o->p, "Lebesgue exponent")->capture_default_str();
  sc->add_option("--a", o->a, "Gaussian exponent")->capture_default_str();
  sc->add_option("--count", o->count, "Grid points per axis")->capture_default_str();
  sc->add_option("--extent", o->extent, "Grid half extent at lambda = 1")->capture_default_str();
  sc->add_flag("--allow-outside-range", o->allow_outside, "Evaluate p outside the estimate's range");
  sc->add_option("--tolerance", o->tolerance, "Largest allowed relative error")->capture_default_str();
  sc->add_option("--out", o->out, "Report JSON (stdout when omitted)");
  sc->callback([o, &action] {
    action = [o](Context& c) {
      require(o->k >= 0, "--k must be non-negative");
      require(o->lambda > 0 && o->a > 0, "--lambda and --a must be positive");
      require(o->p >= 1.0, "--p must be at least 1");
      require(o->count >= 8 && o->extent > 0, "grid needs --count >= 8 and --extent > 0");
      ScalingOptions so;
      so.count = o->count;
      so.base_half_extent = o->extent;
      so.allow_outside_range = o->allow_outside;
      const AnalyticPlane f = PlaneFunction::gaussian(1, o->a).closed_form();
      const ScalingReport r = projection_scaling_probe(f, o->k, o->lambda, o->p, so);
      Json j;
      j["schema_version"] = kSchemaVersion;
      j["k"] = r.k;
      j["lambda"] = r.lambda;
      j["p"] = r.p;
      j["ratio_at_lambda"] = r.ratio_at_lambda;
      j["ratio_at_one"] = r.ratio_at_one;
      j["observed"] = r.observed;
      j["expected"] = r.expected;
      j["relative_error"] = r.relative_error;
      j["in_estimate_range"] = r.in_estimate_range;
      j["k_curve"] = r.k_curve;
      emit(j, o->out, c.rec, c.out);
      if (!(r.relative_error <= o->tolerance)) {
        throw ToleranceExceeded("scaling error " + format_double(r.relative_error));
      }
    };
  });
}

// ---- project / invert ----

HTypeGroup load_or_build_group(const std::string& path, int m, int n) {
  if (path.empty()) return build_htype_group(m, n);
  Json in;
  try {
    in = Json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  HTypeGroup g = group_from_json(in);
  if (g.m() != m || g.n() != n) throw ShapeMismatch(path + " does not match the input's (n, m)");
  return g;
}

Json projection_json(const ProjectionResult& r) {
  Json j;
  j["k_used"] = r.k_used;
  j["sphere_nodes"] = r.sphere_nodes;
  j["k_tail_estimate"] = r.k_tail_estimate;
  j["sphere_residual"] = r.sphere_residual;
  j["output_norm"] = r.values.norm();
  return j;
}

struct ProjectOptions {
  std::string group;
  std::string profile;
  double mu = 1.0;
  std::string in;
  int m = 1;
  int count = 32;
  double extent = 8.0;
  int t_count = 32;
  double t_extent = 16.0;
  int max_k = 500;
  double k_tolerance = 1e-12;
  int sphere_resolution = 16;
  std::uint64_t seed = 1;
  double sphere_tolerance = 1e-6;
  std::string out;
  std::string report;
};

void add_project(CLI::App& app, Action& action) {
  auto o = std::make_shared<ProjectOptions>();
  auto* sub = app.add_subcommand("project", "Spectral projection P_mu f of a grid function (n = 1)");
  sub->add_option("--profile", o->profile, "Spectral profile, e.g. sum:alpha=1,beta=1")->required();
  sub->add_option("--mu", o->mu, "Spectral value")->required();
  sub->add_option("--in", o->in, "Input grid (HTGRID01); a sampled Gaussian when omitted");
  sub->add_option("--group", o->group, "Group JSON (built from (n, m) when omitted)");
  sub->add_option("--m", o->m, "Center dimension of the sampled Gaussian")->capture_default_str();
  sub->add_option("--count", o->count, "Sampled Gaussian: points per z axis")->capture_default_str();
  sub->add_option("--extent", o->extent, "Sampled Gaussian: z half extent")->capture_default_str();
  sub->add_option("--t-count", o->t_count, "Sampled Gaussian: points per t axis")->capture_default_str();
  sub->add_option("--t-extent", o->t_extent, "Sampled Gaussian: t half extent")->capture_default_str();
  sub->add_option("--max-k", o->max_k, "Largest Laguerre index")->capture_default_str();
  sub->add_option("--k-tolerance", o->k_tolerance, "Relative size of negligible k terms")->capture_default_str();
  sub->add_option("--sphere-resolution", o->sphere_resolution, "Sphere rule resolution")->capture_default_str();
  sub->add_option("--sphere-tolerance", o->sphere_tolerance, "Allowed node-doubling change")->capture_default_str();
  sub->add_option("--seed", o->seed, "Seed of the randomized sphere rule (m >= 4)")->capture_default_str();
  sub->add_option("--out", o->out, "Output grid (HTGRID01)")->required();
  sub->add_option("--report", o->report, "Report JSON (stdout when omitted)");
  sub->callback([o, &action] {
    action = [o](Context& c) {
      const SpectralProfile profile = SpectralProfile::parse(o->profile);
      require(profile.contains(o->mu), "--mu lies outside the profile's spectral interval");
      require(o->max_k >= 0 && o->k_tolerance > 0, "--max-k >= 0 and --k-tolerance > 0 required");
      require(o->sphere_resolution >= 1 && o->sphere_tolerance > 0, "bad sphere rule settings");
      const GroupFunction f = [&] {
        if (!o->in.empty()) {
          int n = 1;
          GridField field = read_grid(o->in, &n);
          require(n == 1, "grid inputs need n = 1");
          const int m = field.grid.dims() - 2 * n;
          require(m >= 1, "grid has no central axes");
          return GroupFunction::grid(n, m, std::move(field));
        }
        require(o->m >= 1, "--m must be positive");
        require(o->count >= 4 && o->t_count >= 4 && o->extent > 0 && o->t_extent > 0, "bad sampling grid");
        std::vector<Axis> axes{{o->count, o->extent}, {o->count, o->extent}};
        for (int d = 0; d < o->m; ++d) axes.push_back({o->t_count, o->t_extent});
        return sample_on_grid(gaussian_group_function(1, o->m), TensorGrid(std::move(axes)));
      }();
      const HTypeGroup group = load_or_build_group(o->group, f.m(), f.n());
      RestrictionOptions ro;
      ro.max_k = o->max_k;
      ro.k_tolerance = o->k_tolerance;
      ro.sphere_resolution = o->sphere_resolution;
      ro.sphere_tolerance = o->sphere_tolerance;
      ro.seed = o->seed;
      c.rec.seeds.push_back(o->seed);
      const ProjectionResult r = restriction_apply(group, profile, f, o->mu, {}, ro);
      write_grid(o->out, r.values.grid, f.n());
      c.rec.outputs.push_back(o->out);
      Json rep{{"schema_version", kSchemaVersion}, {"profile", profile.to_string()}, {"mu", o->mu}};
      rep.update(projection_json(r));
      emit(rep, o->report, c.rec, c.out);
    };
  });
}

struct InvertOptions {
  int n = 1;
  int m = 1;
  std::string profile = "delta";
  int intervals = 128;
  int max_k = 500;
  int sphere_resolution = 32;
  int qmc_points = 4096;
  std::uint64_t seed = 1;
  double r_max = 8.0;
  int radii = 33;
  int t_count = 9;
  double tolerance = 1e-2;
  std::string out;
  std::string samples;
};

void add_invert(CLI::App& app, Action& action) {
  auto o = std::make_shared<InvertOptions>();
  auto* sub = app.add_subcommand("invert", "Reconstruct exp(-|z|^2/4 - |t|^2/2) from int P_mu f dmu");
  sub->add_option("--n", o->n, "Half the dimension of the first layer")->capture_default_str();
  sub->add_option("--m", o->m, "Center dimension")->capture_default_str();
  sub->add_option("--profile", o->profile, "Spectral profile")->capture_default_str();
  sub->add_option("--intervals", o->intervals, "Simpson intervals in log mu (even)")->capture_default_str();
  sub->add_option("--max-k", o->max_k, "Largest Laguerre index")->capture_default_str();
  sub->add_option("--sphere-resolution", o->sphere_resolution, "Sphere rule resolution")->capture_default_str();
  sub->add_option("--qmc-points", o->qmc_points, "Sphere points when m >= 4")->capture_default_str();
  sub->add_option("--seed", o->seed, "Seed of the randomized sphere rule")->capture_default_str();
  sub->add_option("--r-max", o->r_max, "Largest sampled |z|")->capture_default_str();
  sub->add_option("--radii", o->radii, "Number of sampled |z|")->capture_default_str();
  sub->add_option("--t-count", o->t_count, "Number of sampled t")->capture_default_str();
  sub->add_option("--tolerance", o->tolerance, "Largest allowed relative L2 error")->capture_default_str();
  sub->add_option("--out", o->out, "Report JSON")->required();
  sub->add_option("--samples", o->samples, "Reconstructed samples (HTSAMP01)");
  sub->callback([o, &action] {
    action = [o](Context& c) {
      require(o->n >= 1 && o->m >= 1, "--n and --m must be positive");
      require(o->intervals >= 2 && o->intervals % 2 == 0, "--intervals must be even and positive");
      require(o->max_k >= 0 && o->sphere_resolution >= 1 && o->qmc_points >= 1, "bad quadrature settings");
      require(o->r_max > 0 && o->radii >= 2 && o->t_count >= 1, "bad sample layout");
      const SpectralProfile profile = SpectralProfile::parse(o->profile);
      const HTypeGroup group = build_htype_group(o->m, o->n);
      const GroupFunction f = GroupFunction::spectral(gaussian_group_function(o->n, o->m));
      SampleLayout layout;
      layout.radii = linspace(0.0, o->r_max, o->radii);
      for (int j = 0; j < o->t_count; ++j) {
        const double u = o->t_count == 1 ? 0.0 : -4.0 + 8.0 * j / (o->t_count - 1);
        for (int d = 0; d < o->m; ++d) layout.t_points.push_back(d == 0 ? u : 0.3 * j);
      }
      CalculusOptions co;
      co.intervals = o->intervals;
      co.restriction.max_k = o->max_k;
      co.restriction.sphere_resolution = o->sphere_resolution;
      co.restriction.qmc_points = o->qmc_points;
      co.restriction.seed = o->seed;
      c.rec.seeds.push_back(o->seed);
      const CalculusTable table = restriction_table(group, profile, f, layout, co);
      const GroupValues result = integrate_symbol(table, [](double) { return 1.0; });
      const GroupValues input = sample_input(f, layout);
      const double err = relative_error(result, input);
      Json j;
      j["schema_version"] = kSchemaVersion;
      j["profile"] = profile.to_string();
      j["n"] = o->n;
      j["m"] = o->m;
      j["mu_lo"] = table.mu_lo;
      j["mu_hi"] = table.mu_hi;
      j["intervals"] = o->intervals;
      j["relative_error"] = err;
      j["input_norm"] = input.norm();
      j["output_norm"] = result.norm();
      emit(j, o->out, c.rec, c.out);
      if (!o->samples.empty()) {
        write_samples(o->samples, result.samples);
        c.rec.outputs.push_back(o->samples);
      }
      if (!(err <= o->tolerance)) throw ToleranceExceeded("inversion error " + format_double(err));
    };
  });
}

// ---- constant / fit / sumbound ----

struct ConstantOptions {
  std::string profile;
  double p = 1.0;
  int n = 2;
  int m = 3;
  std::string mu;
  double relative_tolerance = 1e-8;
  bool diagnostic = false;
  std::string in;
  std::string regime;
  double tolerance = -1.0;
  double nu = -2.0;
  std::string a_spec = "log:10:1e5:25";
  std::string out;
};

void add_constant(CLI::App& app, Action& action) {
  auto o = std::make_shared<ConstantOptions>();
  auto* sub = app.add_subcommand("constant", "Tabulate the restriction constant C_mu as CSV");
  sub->add_option("--profile", o->profile, "Spectral profile")->required();
  sub->add_option("--p", o->p, "Lebesgue exponent")->required();
  sub->add_option("--n", o->n, "Half the dimension of the first layer")->required();
  sub->add_option("--m", o->m, "Center dimension")->required();
  sub->add_option("--mu", o->mu, "mu grid: log:lo:hi:count, lin:lo:hi:count or eps1:lo:hi:count")->required();
  sub->add_option("--relative-tolerance", o->relative_tolerance, "Tail estimate relative to the sum")
      ->capture_default_str();
  sub->add_flag("--diagnostic", o->diagnostic, "Allow p beyond (2m+2)/(m+3) and m = 1");
  sub->add_option("--out", o->out, "Output CSV")->required();
  sub->callback([o, &action] {
    action = [o](Context& c) {
      const SpectralProfile profile = SpectralProfile::parse(o->profile);
      check_p(o->p);
      require(o->n >= 1 && o->m >= 1, "--n and --m must be positive");
      require(o->relative_tolerance > 0 && o->relative_tolerance < 1, "--relative-tolerance must lie in (0, 1)");
      const std::vector<double> mu = parse_mu_spec(o->mu);
      for (double v : mu) require(profile.contains(v), "mu " + format_double(v) + " is outside the spectrum");
      SeriesOptions so;
      so.relative_tolerance = o->relative_tolerance;
      so.diagnostic = o->diagnostic;
      const ConstantCurve curve = constant_curve(profile, o->p, o->n, o->m, mu, so);
      write_text(o->out, curve_csv(curve));
      c.rec.outputs.push_back(o->out);
      c.rec.config = Json{{"profile", profile.to_string()}, {"p", o->p}, {"n", o->n}, {"m", o->m}};
    };
  });
}

void add_fit(CLI::App& app, Action& action) {
  auto o = std::make_shared<ConstantOptions>();
  auto* sub = app.add_subcommand("fit", "Fit the log-log slope of a C_mu curve in one regime");
  sub->add_option("--in", o->in, "Curve CSV written by 'constant'")->required();
  sub->add_option("--regime", o->regime, "large, small, limit0 or limit1")->required();
  auto* prof = sub->add_option("--profile", o->profile, "Profile (read from the CSV's manifest when omitted)");
  auto* pp = sub->add_option("--p", o->p, "Lebesgue exponent (from the manifest when omitted)");
  auto* nn = sub->add_option("--n", o->n, "First-layer half dimension (from the manifest when omitted)");
  auto* mm = sub->add_option("--m", o->m, "Center dimension (from the manifest when omitted)");
  sub->add_option("--tolerance", o->tolerance, "Fail when |fitted - predicted| exceeds this");
  sub->add_option("--out", o->out, "Report JSON (stdout when omitted)");
  sub->callback([o, prof, pp, nn, mm, &action] {
    const bool have_profile = prof->count() > 0, have_p = pp->count() > 0;
    const bool have_n = nn->count() > 0, have_m = mm->count() > 0;
    action = [o, have_profile, have_p, have_n, have_m](Context& c) {
      const Regime regime = parse_regime(o->regime);
      const std::vector<ConstantRow> rows = parse_curve_csv(read_text(o->in));
      if (!(have_profile && have_p && have_n && have_m)) {
        const std::string manifest = o->in + ".manifest.json";
        if (!std::filesystem::exists(manifest)) {
          throw ParseError("no " + manifest + "; pass --profile, --p, --n and --m");
        }
        Json cfg;
        try {
          cfg = Json::parse(read_text(manifest)).at("config");
          if (!have_profile) o->profile = cfg.at("profile").get<std::string>();
          if (!have_p) o->p = cfg.at("p").get<double>();
          if (!have_n) o->n = cfg.at("n").get<int>();
          if (!have_m) o->m = cfg.at("m").get<int>();
        } catch (const nlohmann::json::exception& e) {
          throw ParseError(manifest + ": " + e.what());
        }
      }
      ConstantCurve curve;
      curve.profile = SpectralProfile::parse(o->profile);
      check_p(o->p);
      require(o->n >= 1 && o->m >= 1, "--n and --m must be positive");
      curve.p = o->p;
      curve.n = o->n;
      curve.m = o->m;
      curve.rows = rows;
      const ExponentPrediction pred = predicted_exponent(curve.profile, regime, o->p, o->n, o->m);
      const ExponentFit fit = fit_exponent(curve, regime);
      Json j = exponent_report(pred, fit);
      j["difference"] = fit.slope - pred.exponent;
      emit(j, o->out, c.rec, c.out);
      if (o->tolerance >= 0 && !(std::abs(fit.slope - pred.exponent) <= o->tolerance)) {
        throw ToleranceExceeded("fitted slope " + format_double(fit.slope) + " vs predicted " +
                                format_double(pred.exponent));
      }
    };
  });
}

void add_sumbound(CLI::App& app, Action& action) {
  auto o = std::make_shared<ConstantOptions>();
  auto* sub = app.add_subcommand("sumbound", "Ratios S(A) / A^(nu+1) of lattice power sums");
  sub->add_option("--nu", o->nu, "Power (nu != -1)")->required();
  sub->add_option("--n", o->n, "Offset n in 2k+n")->required();
  sub->add_option("--a", o->a_spec, "A grid: log:lo:hi:count or lin:lo:hi:count")->capture_default_str();
  sub->add_option("--out", o->out, "Report JSON (stdout when omitted)");
  sub->callback([o, &action] {
    action = [o](Context& c) {
      require(o->n >= 1, "--n must be positive");
      require(std::isfinite(o->nu) && o->nu != -1.0, "--nu must be finite and differ from -1");
      const std::vector<double> a = parse_mu_spec(o->a_spec);
      for (double v : a) require(v > 0, "A values must be positive");
      const SumBoundReport r = sum_bound_check(o->nu, o->n, a);
      Json j;
      j["schema_version"] = kSchemaVersion;
      j["nu"] = r.nu;
      j["n"] = r.n;
      j["tail_form"] = r.tail_form;
      j["a_values"] = r.a_values;
      j["sums"] = r.sums;
      j["ratios"] = r.ratios;
      j["max_ratio"] = r.max_ratio;
      j["extended_max_ratio"] = r.extended_max_ratio;
      j["bounded"] = r.bounded;
      emit(j, o->out, c.rec, c.out);
    };
  });
}

// ---- sharpness ----

struct SharpnessOptions {
  int n = 2;
  int m = 3;
  std::string h = "gaussian";
  std::uint64_t seed = 1;
  std::vector<double> knots;
  SharpnessGrid grid;
  double tolerance = 1e-3;
  bool norms = false;
  double p = 0.0;
  std::string out;
  std::string samples;
};

void add_sharpness(CLI::App& app, Action& action) {
  auto o = std::make_shared<SharpnessOptions>();
  auto* sub = app.add_subcommand("sharpness", "Check P_{2n^2} f against (1/3) n^(n-1) e^(-n|z|^2/4) h * dsigma_n^");
  sub->add_option("--n", o->n, "Half the dimension of the first layer")->capture_default_str();
  sub->add_option("--m", o->m, "Center dimension (>= 2)")->capture_default_str();
  sub->set_help_flag("--help", "Print this help message and exit");
  sub->add_option("--h", o->h, "Seed family (gaussian)")->capture_default_str();
  sub->add_option("--seed", o->seed, "Seed of the random Gaussian and of the sphere rule")->capture_default_str();
  sub->add_option("--knots", o->knots, "Bump knots a b c d (default n/4 n/2 2n 4n)")->expected(4);
  sub->add_option("--radii", o->grid.radii, "Sampled |z| count")->capture_default_str();
  sub->add_option("--r-max", o->grid.r_max, "Largest sampled |z|")->capture_default_str();
  sub->add_option("--t-per-axis", o->grid.t_per_axis, "Sampled t per axis")->capture_default_str();
  sub->add_option("--t-extent", o->grid.t_extent, "t half extent around the seed's center")->capture_default_str();
  sub->add_option("--sphere-resolution", o->grid.sphere_resolution, "Sphere rule resolution (m <= 3)")
      ->capture_default_str();
  sub->add_option("--qmc-points", o->grid.qmc_points, "Sphere points when m >= 4")->capture_default_str();
  sub->add_option("--tolerance", o->tolerance, "Largest allowed relative L2 gap")->capture_default_str();
  sub->add_flag("--norms", o->norms, "Also check ||f||_p <= ||h||_p ||g||_mixed on radial tables");
  sub->add_option("--p", o->p, "Exponent for --norms (default (2m+2)/(m+3))");
  sub->add_option("--out", o->out, "Report JSON")->required();
  sub->add_option("--samples", o->samples, "P f samples (HTSAMP01)");
  sub->callback([o, &action] {
    action = [o](Context& c) {
      require(o->h == "gaussian", "--h supports 'gaussian' only");
      require(o->n >= 1 && o->m >= 2, "needs n >= 1 and m >= 2");
      require(o->grid.radii >= 2 && o->grid.r_max > 0 && o->grid.t_per_axis >= 1 && o->grid.t_extent >= 0,
              "bad sample layout");
      require(o->grid.sphere_resolution >= 1 && o->grid.qmc_points >= 1, "bad sphere rule settings");
      const double p = o->p > 0 ? o->p : (2.0 * o->m + 2.0) / (o->m + 3.0);
      check_p(p);
      BumpKnots knots = default_knots(o->n);
      if (!o->knots.empty()) knots = {o->knots[0], o->knots[1], o->knots[2], o->knots[3]};
      const GaussianSeed h = random_gaussian_seed(o->m, o->seed);
      c.rec.seeds.push_back(o->seed);
      const SharpnessInstance inst = build_sharpness_instance(o->n, o->m, knots, h);
      const SharpnessReport r = verify_sharpness_identity(inst, o->grid);
      const double q = p / (p - 1.0);
      Json j;
      j["schema_version"] = kSchemaVersion;
      j["n"] = o->n;
      j["m"] = o->m;
      j["seed"] = o->seed;
      j["h"] = {{"family", "gaussian"}, {"sigma", h.sigma}, {"center", h.center}, {"amplitude", h.amplitude}};
      j["knots"] = {knots.a, knots.b, knots.c, knots.d};
      j["gap"] = r.gap;
      j["psi_at_n"] = r.psi_at_n;
      j["projection_norm"] = r.projection_norm;
      j["closed_form_norm"] = r.closed_form_norm;
      j["separability"] = r.separability;
      j["sphere_residual"] = r.sphere_residual;
      j["k_used"] = r.k_used;
      j["q"] = q;
      j["norm_ratio"] = sharpness_norm_ratio(r, q);
      if (o->norms) {
        const double fp = lp_norm(sharpness_table(inst, true, {}), p);
        const double gm = mixed_norm(sharpness_table(inst, false, {}), p);
        const double hp = gaussian_lp_norm(h, p);
        j["p"] = p;
        j["f_lp_norm"] = fp;
        j["h_lp_norm"] = hp;
        j["g_mixed_norm"] = gm;
        j["young_holds"] = fp <= hp * gm;
      }
      emit(j, o->out, c.rec, c.out);
      if (!o->samples.empty()) {
        write_samples(o->samples, r.projection);
        c.rec.outputs.push_back(o->samples);
      }
      if (!(r.gap <= o->tolerance)) throw ToleranceExceeded("identity gap " + format_double(r.gap));
    };
  });
}

// ---- replay ----

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

void add_replay(CLI::App& app, Action& action) {
  auto o = std::make_shared<std::string>();
  auto* sub = app.add_subcommand("replay", "Re-run a manifest and compare the artifacts byte for byte");
  sub->add_option("manifest", *o, "Manifest JSON")->required();
  sub->callback([o, &action] {
    action = [o](Context& c) {
      Json man;
      std::vector<std::string> args{"htype"};
      std::vector<std::pair<std::string, std::string>> recorded;
      try {
        man = Json::parse(read_text(*o));
        if (man.at("schema_version").get<int>() != kSchemaVersion) throw ParseError("unsupported manifest schema");
        for (const auto& a : man.at("arguments")) args.push_back(a.get<std::string>());
        for (const auto& out : man.at("outputs")) {
          recorded.emplace_back(out.at("path").get<std::string>(), out.at("fnv1a64").get<std::string>());
        }
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(*o + ": " + e.what());
      }
      require(args.size() > 1 && args[1] != "replay", "manifest does not record a replayable command");
      std::ostringstream sink;
      const int status = run_impl(args, sink, c.err);
      Json rep;
      rep["schema_version"] = kSchemaVersion;
      rep["manifest"] = *o;
      rep["status"] = status;
      bool identical = status == kExitOk;
      Json outs = Json::array();
      for (const auto& [path, digest] : recorded) {
        const std::string now = std::filesystem::exists(path) ? file_digest(path) : "";
        outs.push_back({{"path", path}, {"recorded", digest}, {"replayed", now}, {"identical", now == digest}});
        identical = identical && now == digest;
      }
      rep["outputs"] = outs;
      rep["identical"] = identical;
      c.out << rep.dump(2) << "\n";
      if (status != kExitOk) throw ToleranceExceeded("replayed command exited with " + std::to_string(status));
      if (!identical) throw ToleranceExceeded("replayed artifacts differ from the manifest");
    };
  });
}

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral projection numerics on H-type groups", "htype"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Action action;
  add_group(app, action);
  add_hermite(app, action);
  add_project(app, action);
  add_invert(app, action);
  add_constant(app, action);
  add_fit(app, action);
  add_sumbound(app, action);
  add_sharpness(app, action);
  add_replay(app, action);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!action) {
    err << "usage error: no command given\n";
    return kExitUsage;
  }

  RunRecord rec;
  rec.arguments.assign(args.begin() + 1, args.end());
  for (const CLI::App* sub = &app; sub != nullptr;) {
    const auto subs = sub->get_subcommands();
    if (subs.empty()) break;
    sub = subs.front();
    rec.command += (rec.command.empty() ? "" : " ") + sub->get_name();
  }
  Context ctx{rec, out, err};
  const auto start = std::chrono::steady_clock::now();
  int status = kExitOk;
  try {
    action(ctx);
  } catch (const std::exception& e) {
    status = exit_code_for(e);
    err << (status == kExitNumerical ? "numerical failure: " : "invalid input: ") << e.what() << "\n";
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // tolerance failures still leave a complete, replayable record
  if (status == kExitOk || status == kExitNumerical) {
    try {
      write_manifest(rec, wall);
    } catch (const std::exception& e) {
      err << "cannot write manifest: " << e.what() << "\n";
      if (status == kExitOk) status = kExitValidation;
    }
  }
  return status;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run_impl(args, out, err);
}

}  // namespace htype::cli
