#pragma once

#include <string>
#include <vector>

#include "htype/profile.hpp"

namespace htype {

/// Hurwitz zeta sum_{j>=0} (a + j)^{-s}, s > 1, a > 0 (Euler-Maclaurin).
double hurwitz_zeta(double s, double a);

struct SumBoundReport {
  double nu = 0.0;
  int n = 1;
  bool tail_form = true;  // nu < -1: sum over 2k+n >= A; else over 2k+n <= A
  std::vector<double> a_values;
  std::vector<double> sums;
  std::vector<double> ratios;  // S(A) / A^{nu+1}
  double max_ratio = 0.0;      // empirical constant
  double extended_max_ratio = 0.0;  // max over the grid extended tenfold
  bool bounded = false;
};

/// S(A) = sum_{k >= 0, 2k+n >= A} (2k+n)^nu for nu < -1, or over 2k+n <= A
/// for nu > -1, and the ratios S(A) / A^{nu+1}.
SumBoundReport sum_bound_check(double nu, int n, const std::vector<double>& a_values);

struct SeriesOptions {
  double relative_tolerance = 1e-8;
  int initial_k = 64;
  int max_k = 1 << 22;
  /// Accept p beyond (2m+2)/(m+3) and m = 1 (diagnostic use only).
  bool diagnostic = false;
};

struct SeriesValue {
  double value = 0.0;
  int k_used = 0;          // terms summed directly
  double tail_bound = 0.0; // tail error estimate
  double partial_sum = 0.0;
};

/// C_mu = sum_k (2k+n)^{2n(1/p-1/2)-1} lambda_k^{2(n+m)(1/p-1/2)-1} |lambda_k'|.
/// Terms up to k_used are summed directly; the rest is the midpoint
/// Euler-Maclaurin integral 1/2 int_{s_K-1}^inf t(s) ds plus its first
/// derivative correction, whose size is reported as `tail_bound`.
SeriesValue constant_series(const SpectralProfile& profile, double p, int n, int m, double mu,
                            const SeriesOptions& opts = {});

/// The two parts of the series for the sum family split at
/// 2k+n = mu^{(2b-a)/(2ab)}, each evaluated with the monomial solution that
/// dominates on its side.
struct RegimeSplit {
  double threshold = 0.0;
  double part_one = 0.0;   // 2k+n >= threshold, xi-monomial envelope
  double part_two = 0.0;   // 2k+n < threshold, eta-monomial envelope
  double total = 0.0;      // constant_series value
  double ratio = 0.0;      // (part_one + part_two) / total
};

RegimeSplit regime_split(const SpectralProfile& profile, double p, int n, int m, double mu);

struct ConstantRow {
  double mu = 0.0;
  double c_mu = 0.0;
  int k_used = 0;
  double tail_bound = 0.0;
};

struct ConstantCurve {
  SpectralProfile profile = SpectralProfile::delta();
  double p = 1.0;
  int n = 1;
  int m = 2;
  std::vector<ConstantRow> rows;
};

ConstantCurve constant_curve(const SpectralProfile& profile, double p, int n, int m,
                             const std::vector<double>& mu, const SeriesOptions& opts = {});

enum class Regime { Large, Small, Limit0, Limit1 };

std::string to_string(Regime r);
Regime parse_regime(const std::string& text);

struct ExponentPrediction {
  std::string family;
  std::string params;
  Regime regime = Regime::Large;
  double exponent = 0.0;
  /// Variable of the power law: "mu", "1-mu" or "1-mu^(1/gamma)".
  std::string variable = "mu";
  std::string source;
};

ExponentPrediction predicted_exponent(const SpectralProfile& profile, Regime regime, double p,
                                      int n, int m);

/// Regimes a family supports.
std::vector<Regime> regimes_for(const SpectralProfile& profile);

/// Default mu-points of a regime: large [1e3, 1e7], small [1e-7, 1e-3],
/// limit0 [1e-7, 1e-3], limit1 with the distance variable on 2^-12..2^-30.
std::vector<double> regime_window(const SpectralProfile& profile, Regime regime, int count = 25);

/// The regime's fit abscissa: mu, or the distance to 1 in the family's variable.
double regime_variable(const SpectralProfile& profile, Regime regime, double mu);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double max_residual = 0.0;
  int points = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

/// Least squares of log y on log x.
ExponentFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Fits the curve rows in the regime's window (at least 8 points).
ExponentFit fit_exponent(const ConstantCurve& curve, Regime regime);

}  // namespace htype
