#include "htype/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "htype/common.hpp"
#include "htype/quadrature.hpp"

namespace htype {

namespace {

using Family = SpectralProfile::Family;

double p_max(int m) { return (2.0 * m + 2.0) / (m + 3.0); }

void check_exponent(double p, int n, int m, bool diagnostic) {
  if (n < 1 || m < 1) throw DomainError("n and m must be >= 1");
  if (!(p >= 1.0) || !(p < 2.0)) throw ExponentOutOfRange("p must lie in [1, 2)");
  if (diagnostic) return;
  if (m < 2) throw ExponentOutOfRange("the estimates need m > 1");
  if (p > p_max(m) * (1.0 + 1e-12)) {
    throw ExponentOutOfRange("p = " + std::to_string(p) + " exceeds (2m+2)/(m+3) = " +
                             std::to_string(p_max(m)));
  }
}

// One term of the series at s = 2k+n, carried in logs.
struct TermEval {
  const SpectralProfile& h;
  double mu;
  double ea;  // exponent of s
  double eb;  // exponent of lambda
  double guess = std::numeric_limits<double>::quiet_NaN();

  double operator()(double s) {
    const LambdaSolution sol = lambda_solve_at(h, s, mu, guess);
    guess = sol.lambda;
    return std::exp(ea * std::log(s) + eb * std::log(sol.lambda) + std::log(std::abs(sol.dlambda)));
  }
};

struct TailIntegral {
  double integral = 0.0;  // int_a^inf t(s) ds
  double error = 0.0;
};

// int_a^inf t(s) ds by Gauss-Legendre panels in log s, then a power-law
// extrapolation once the local decay rate exceeds 1.
TailIntegral tail_integral(TermEval& t, double a) {
  const QuadratureRule gl = gauss_legendre(10, 0.0, 0.25);
  CompensatedSum<double> total;
  double u = std::log(a);
  TailIntegral out;
  double t_prev = t(a);
  for (int panel = 0; panel < 8000; ++panel) {
    CompensatedSum<double> piece;
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double s = std::exp(u + gl.nodes[i]);
      piece.add(gl.weights[i] * t(s) * s);
    }
    total.add(piece.value());
    u += 0.25;
    const double t_end = t(std::exp(u));
    const double rate = -(std::log(t_end) - std::log(t_prev)) / 0.25;
    t_prev = t_end;
    if (rate > 1.05 && piece.value() <= 1e-13 * total.value()) {
      const double far = t_end * std::exp(u) / (rate - 1.0);
      total.add(far);
      out.error = 0.1 * far + 1e-14 * total.value();
      out.integral = total.value();
      return out;
    }
  }
  throw QuadratureError("the series tail does not decay fast enough to integrate");
}

}  // namespace

SeriesValue constant_series(const SpectralProfile& profile, double p, int n, int m, double mu,
                            const SeriesOptions& opts) {
  check_exponent(p, n, m, opts.diagnostic);
  if (std::isnan(mu) || !profile.contains(mu)) {
    throw DomainError("mu = " + std::to_string(mu) + " lies outside the profile's spectrum");
  }
  const double q = 1.0 / p - 0.5;
  TermEval term{profile, mu, 2.0 * n * q - 1.0, 2.0 * (n + m) * q - 1.0};
  CompensatedSum<double> partial;
  int K = 0;
  int target = std::max(opts.initial_k, 2);
  SeriesValue out;
  for (;;) {
    term.guess = std::numeric_limits<double>::quiet_NaN();
    for (; K < target; ++K) partial.add(term(2.0 * K + n));
    // Midpoint Euler-Maclaurin: sum_{k>=K} t(s_k) = 1/2 int_a^inf t + t'(a)/12 + R,
    // a = s_K - 1, with |R| well below the first correction for smooth tails.
    const double a = 2.0 * K + n - 1.0;
    TermEval tail_term{profile, mu, term.ea, term.eb};
    const TailIntegral ti = tail_integral(tail_term, a);
    const double d = 1e-3 * a;
    const double slope = (tail_term(a + d) - tail_term(a - d)) / (2.0 * d);
    out.partial_sum = partial.value();
    out.value = out.partial_sum + 0.5 * ti.integral + slope / 12.0;
    out.tail_bound = std::abs(slope) / 12.0 + 0.5 * ti.error;
    out.k_used = K;
    if (out.tail_bound <= opts.relative_tolerance * out.partial_sum) return out;
    if (2 * K > opts.max_k) {
      throw QuadratureError("series tail bound stays above tolerance at K = " + std::to_string(K));
    }
    target = 2 * K;
  }
}

RegimeSplit regime_split(const SpectralProfile& profile, double p, int n, int m, double mu) {
  if (profile.family() != Family::Sum && profile.family() != Family::Delta) {
    throw InvalidRegime("the regime split applies to the sum family");
  }
  const double al = profile.xi_power();
  const double be = profile.eta_power();
  if (!(al < 2.0 * be)) throw InvalidRegime("the split needs alpha < 2 beta");
  if (!(mu > 1.0)) throw InvalidRegime("the split applies for mu > 1");
  const double q = 1.0 / p - 0.5;
  const double ea = 2.0 * n * q - 1.0;
  const double eb = 2.0 * (n + m) * q - 1.0;
  RegimeSplit r;
  r.threshold = std::pow(mu, (2.0 * be - al) / (2.0 * al * be));
  // xi alone: lambda = mu^{1/a} / s, lambda' = mu^{1/a - 1} / (a s)
  const double k0 = std::max(0.0, std::ceil((r.threshold - n) / 2.0));
  const double one_sum = std::pow(2.0, ea - eb - 1.0) * hurwitz_zeta(eb + 1.0 - ea, k0 + 0.5 * n);
  r.part_one = std::pow(mu, (eb + 1.0) / al - 1.0) / al * one_sum;
  // eta alone: lambda = mu^{1/2b}, lambda' = mu^{1/2b - 1} / (2b)
  CompensatedSum<double> head;
  for (long k = 0; 2.0 * k + n < r.threshold; ++k) head.add(std::pow(2.0 * k + n, ea));
  r.part_two = std::pow(mu, (eb + 1.0) / (2.0 * be) - 1.0) / (2.0 * be) * head.value();
  r.total = constant_series(profile, p, n, m, mu).value;
  r.ratio = (r.part_one + r.part_two) / r.total;
  return r;
}

ConstantCurve constant_curve(const SpectralProfile& profile, double p, int n, int m,
                             const std::vector<double>& mu, const SeriesOptions& opts) {
  check_exponent(p, n, m, opts.diagnostic);
  for (std::size_t i = 1; i < mu.size(); ++i) {
    if (!(mu[i] > mu[i - 1])) throw DomainError("mu values must be strictly increasing");
  }
  ConstantCurve c{profile, p, n, m, std::vector<ConstantRow>(mu.size())};
  parallel_for(mu.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const SeriesValue v = constant_series(profile, p, n, m, mu[i], opts);
      c.rows[i] = {mu[i], v.value, v.k_used, v.tail_bound};
    }
  });
  return c;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Large:
      return "large";
    case Regime::Small:
      return "small";
    case Regime::Limit0:
      return "limit0";
    case Regime::Limit1:
      return "limit1";
  }
  return "";
}

Regime parse_regime(const std::string& text) {
  for (Regime r : {Regime::Large, Regime::Small, Regime::Limit0, Regime::Limit1}) {
    if (to_string(r) == text) return r;
  }
  throw ParseError("unknown regime '" + text + "' (large, small, limit0, limit1)");
}

std::vector<Regime> regimes_for(const SpectralProfile& profile) {
  if (profile.family() == Family::Resolvent || profile.family() == Family::Shifted) {
    return {Regime::Limit0, Regime::Limit1};
  }
  return {Regime::Large, Regime::Small};
}

namespace {

void check_regime(const SpectralProfile& profile, Regime regime) {
  const auto allowed = regimes_for(profile);
  if (std::find(allowed.begin(), allowed.end(), regime) == allowed.end()) {
    throw InvalidRegime("regime '" + to_string(regime) + "' does not apply to " +
                        profile.to_string());
  }
}

std::string params_of(const SpectralProfile& h) {
  const std::string s = h.to_string();
  const auto colon = s.find(':');
  return colon == std::string::npos ? "" : s.substr(colon + 1);
}

}  // namespace

ExponentPrediction predicted_exponent(const SpectralProfile& profile, Regime regime, double p,
                                      int n, int m) {
  check_regime(profile, regime);
  if (n < 1 || m < 1) throw DomainError("n and m must be >= 1");
  if (!(p >= 1.0 && p < 2.0)) throw ExponentOutOfRange("p must lie in [1, 2)");
  const double q = 1.0 / p - 0.5;
  const double al = profile.xi_power();
  const double be = profile.eta_power();
  const double ga = (profile.family() == Family::Power || profile.family() == Family::InversePower ||
                     profile.family() == Family::Shifted)
                        ? profile.gamma()
                        : 1.0;
  // (2/(a g)) (n + a m/(2b)) q and (2/(a g)) (n + m) q
  const double mixed = 2.0 / (al * ga) * (n + al * m / (2.0 * be)) * q;
  const double full = 2.0 / (al * ga) * (n + m) * q;
  ExponentPrediction e;
  const std::string s = profile.to_string();
  e.family = s.substr(0, s.find(':'));
  e.params = params_of(profile);
  e.regime = regime;
  const bool large = regime == Regime::Large;
  const std::string cmp = al < 2.0 * be ? "alpha < 2 beta" : (al > 2.0 * be ? "alpha > 2 beta" : "alpha = 2 beta");
  switch (profile.family()) {
    case Family::Sum:
    case Family::Power:
    case Family::Delta: {
      double x = full;
      if (al < 2.0 * be && large) x = mixed;
      if (al > 2.0 * be && !large) x = mixed;
      e.exponent = x - 1.0;
      e.source = e.family + " family, " + cmp + ", " + to_string(regime) + " mu";
      break;
    }
    case Family::InversePower: {
      double x = full;
      if (al < 2.0 * be && !large) x = mixed;
      if (al > 2.0 * be && large) x = mixed;
      e.exponent = -x - 1.0;
      e.source = "inverse power family, " + cmp + ", " + to_string(regime) + " mu";
      break;
    }
    case Family::Xi:
      e.exponent = 2.0 * (n + m) * q - 1.0;
      e.source = "sublaplacian alone";
      break;
    case Family::Resolvent:
      e.exponent = regime == Regime::Limit0 ? -2.0 * (n + m) * q - 1.0 : 2.0 * (n + m) * q - 1.0;
      e.variable = regime == Regime::Limit0 ? "mu" : "1-mu";
      e.source = "resolvent, mu -> " + std::string(regime == Regime::Limit0 ? "0" : "1");
      break;
    case Family::Shifted: {
      const bool low = al <= 2.0 * be;
      if (regime == Regime::Limit0) {
        e.exponent = -(low ? mixed : full) - 1.0;
      } else {
        // the distance variable carries no 1/gamma
        e.exponent = ga * (low ? full : mixed) - 1.0;
        e.variable = "1-mu^(1/gamma)";
      }
      e.source = "shifted family, " + std::string(low ? "alpha <= 2 beta" : "alpha > 2 beta") +
                 ", mu -> " + (regime == Regime::Limit0 ? "0" : "1");
      break;
    }
  }
  return e;
}

double regime_variable(const SpectralProfile& profile, Regime regime, double mu) {
  if (regime != Regime::Limit1) return mu;
  if (profile.family() == Family::Shifted) return -std::expm1(std::log(mu) / profile.gamma());
  return 1.0 - mu;
}

namespace {

void window_bounds(Regime regime, double& lo, double& hi) {
  switch (regime) {
    case Regime::Large:
      lo = 1e3, hi = 1e7;
      return;
    case Regime::Small:
    case Regime::Limit0:
      lo = 1e-7, hi = 1e-3;
      return;
    case Regime::Limit1:
      lo = std::ldexp(1.0, -30), hi = std::ldexp(1.0, -12);
      return;
  }
}

}  // namespace

std::vector<double> regime_window(const SpectralProfile& profile, Regime regime, int count) {
  check_regime(profile, regime);
  if (count < 2) throw InsufficientData("a window needs at least two points");
  double lo = 0.0, hi = 0.0;
  window_bounds(regime, lo, hi);
  std::vector<double> mu;
  for (int i = 0; i < count; ++i) {
    const double x = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    if (regime != Regime::Limit1) {
      mu.push_back(x);
    } else if (profile.family() == Family::Shifted) {
      mu.push_back(std::pow(1.0 - x, profile.gamma()));
    } else {
      mu.push_back(1.0 - x);
    }
  }
  std::sort(mu.begin(), mu.end());
  return mu;
}

ExponentFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeMismatch("x and y differ in length");
  const std::size_t N = x.size();
  if (N < 8) throw InsufficientData("fit needs at least 8 points, got " + std::to_string(N));
  std::vector<double> lx(N), ly(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw NonPositiveValue("log-log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < N; ++i) mx += lx[i], my += ly[i];
  mx /= N;
  my /= N;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0)) throw InsufficientData("fit abscissae are all equal");
  ExponentFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss += r * r;
    f.max_residual = std::max(f.max_residual, std::abs(r));
  }
  f.stderr_slope = N > 2 ? std::sqrt(ss / (N - 2) / sxx) : 0.0;
  f.points = static_cast<int>(N);
  f.window_lo = *std::min_element(x.begin(), x.end());
  f.window_hi = *std::max_element(x.begin(), x.end());
  return f;
}

ExponentFit fit_exponent(const ConstantCurve& curve, Regime regime) {
  check_regime(curve.profile, regime);
  double lo = 0.0, hi = 0.0;
  window_bounds(regime, lo, hi);
  std::vector<double> x, y;
  for (const auto& row : curve.rows) {
    const double v = regime_variable(curve.profile, regime, row.mu);
    if (v >= lo * (1.0 - 1e-9) && v <= hi * (1.0 + 1e-9)) {
      if (!(row.c_mu > 0)) throw NonPositiveValue("C_mu must be positive to fit");
      x.push_back(v);
      y.push_back(row.c_mu);
    }
  }
  return fit_loglog(x, y);
}

}  // namespace htype
