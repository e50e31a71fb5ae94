#pragma once

#include <limits>
#include <string>

namespace htype {

/// h(xi, eta) from a closed parametric family. Along the joint spectrum
/// xi = (2k+n) lambda, eta = lambda^2 every family is a monotone function of
/// inner(lambda) = ((2k+n) lambda)^alpha + lambda^{2 beta}, or of
/// (2k+n) lambda alone for xi and resolvent.
class SpectralProfile {
 public:
  enum class Family { Sum, Power, InversePower, Resolvent, Shifted, Xi, Delta };

  static SpectralProfile sum(double alpha, double beta);
  static SpectralProfile power(double alpha, double beta, double gamma);
  static SpectralProfile inverse_power(double alpha, double beta, double gamma);
  static SpectralProfile resolvent();
  static SpectralProfile shifted(double alpha, double beta, double gamma);
  static SpectralProfile xi();
  static SpectralProfile delta();

  /// "sum:alpha=1,beta=1", "power:alpha=1,beta=1,gamma=2", "resolvent", "xi", ...
  static SpectralProfile parse(const std::string& text);
  std::string to_string() const;

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  /// Spectral interval (A, B).
  double lower() const;
  double upper() const;
  bool contains(double mu) const { return mu > lower() && mu < upper(); }
  /// true if h((2k+n) lambda, lambda^2) increases with lambda.
  bool increasing() const;

  double operator()(double xi, double eta) const;

  /// Whether the eta term is present (false for xi and resolvent).
  bool has_eta() const;
  /// Exponents of inner(lambda): xi power a and lambda power 2b.
  double xi_power() const;
  double eta_power() const;

 private:
  SpectralProfile(Family f, double a, double b, double g);
  Family family_;
  double alpha_;
  double beta_;
  double gamma_;
};

struct LambdaSolution {
  double lambda = 0.0;
  double dlambda = 0.0;  // d lambda / d mu
};

/// Solves h((2k+n) lambda, lambda^2) = mu.
LambdaSolution lambda_solve(const SpectralProfile& h, int k, int n, double mu);

/// Same with s = 2k+n allowed to be any positive real; `guess` (if finite)
/// warm-starts the iteration.
LambdaSolution lambda_solve_at(const SpectralProfile& h, double s, double mu,
                               double guess = std::numeric_limits<double>::quiet_NaN());

}  // namespace htype
