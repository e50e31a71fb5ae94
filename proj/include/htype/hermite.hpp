#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "htype/common.hpp"
#include "htype/grid.hpp"

namespace htype {

/// f = sum_k coeffs[k] phi_k^lambda on R^{2n}.
struct RadialExpansion {
  int n = 1;
  double lambda = 1.0;
  std::vector<Complex> coeffs;

  Complex value(double r) const;
  double norm2() const;
};

/// Closed-form function on R^{2n}. When `profile` is set the function is
/// radial and value(z) = scale * profile(|z|).
struct AnalyticPlane {
  int n = 1;
  std::function<Complex(std::span<const double>)> value;
  std::function<double(double)> profile;
  Complex scale = 1.0;
  double radius = 8.0;  // negligible beyond this |z|
  std::string label;

  bool radial() const { return static_cast<bool>(profile); }
};

class PlaneFunction {
 public:
  enum class Backend { Grid, Radial, Analytic };

  static PlaneFunction grid(GridField f);
  static PlaneFunction radial(RadialExpansion e);
  static PlaneFunction analytic(AnalyticPlane a);

  /// exp(-a |z|^2) on R^{2n}.
  static PlaneFunction gaussian(int n, double a);
  /// phi_k^lambda on R^{2n}.
  static PlaneFunction laguerre(int k, int n, double lambda);

  Backend backend() const;
  int n() const { return n_; }

  const GridField& grid_field() const;
  const RadialExpansion& expansion() const;
  const AnalyticPlane& closed_form() const;

  Complex operator()(std::span<const double> z) const;

 private:
  int n_ = 1;
  std::variant<GridField, RadialExpansion, AnalyticPlane> data_;
};

/// Default plane grid for n = 1 backends: count points per axis on
/// [-half_extent, half_extent).
TensorGrid plane_grid(int count = 96, double half_extent = 8.0);

PlaneFunction to_grid(const PlaneFunction& f, const TensorGrid& grid);

struct ConvolutionOptions {
  /// Largest |f| on the outer frame of a grid operand, relative to its
  /// maximum, before TruncationError.
  double truncation_tolerance = 1e-10;
  TensorGrid default_grid = plane_grid();
  /// Lattice for grid outputs; must extend the input lattice (same spacing,
  /// same centre). Defaults to the input grid.
  std::optional<TensorGrid> output_grid;
};

/// (f x_lambda g)(z) = int f(z - w) g(w) exp(i lambda/2 Im z.conj(w)) dw.
/// Grid operands use direct product-trapezoid quadrature (n = 1 only); radial
/// operands use the coefficient algebra. Negative lambda reverses the phase.
PlaneFunction twisted_convolution(const PlaneFunction& f, const PlaneFunction& g, double lambda,
                                  const ConvolutionOptions& opts = {});

/// f x_lambda phi_k^|lambda|.
PlaneFunction hermite_project(const PlaneFunction& f, int k, double lambda,
                              const ConvolutionOptions& opts = {});

/// Laguerre coefficients of a radial closed-form function, truncated by the
/// Plancherel tail rule.
RadialExpansion radial_expansion(const AnalyticPlane& f, double lambda, int max_k = 200,
                                 double tail_tolerance = 1e-14);

/// Constants fixed by applying the expansion to f = phi_0 at n = 1,
/// lambda = 1 with grid quadrature.
struct PlancherelNormalization {
  double reproducing_constant = 0.0;  // phi_0 x phi_0 = c phi_0
  double expansion_consistency = 0.0; // c (lambda / 2 pi)^n, should be 1
  double exponent_per_n = 0.0;        // ||f||^2 = (lambda/2pi)^{e n} sum ||f x phi_k||^2
  double reproducing_residual = 0.0;  // ||phi_0 x phi_0 - c phi_0|| / ||c phi_0||
};

PlancherelNormalization resolve_plancherel_normalization();
/// Cached result of resolve_plancherel_normalization.
const PlancherelNormalization& plancherel_normalization();

double l2_norm2(const PlaneFunction& f);

struct Reconstruction {
  PlaneFunction partial_sum;
  int terms = 0;
  double input_norm2 = 0.0;
  /// (lambda/2pi)^{e n} ||f x phi_k||^2 for each k, e the resolved exponent.
  std::vector<double> term_norm2;
  /// Relative Plancherel tail after each k: 1 - (normalized partial sum) / ||f||^2.
  std::vector<double> tail;
};

struct ReconstructOptions {
  int max_k = 200;
  double tail_tolerance = 1e-13;
  ConvolutionOptions convolution;
};

/// (lambda/2pi)^n sum_{k<=K} f x phi_k. K < 0 selects the tail rule.
Reconstruction reconstruct(const PlaneFunction& f, double lambda, int K,
                           const ReconstructOptions& opts = {});

struct PlancherelReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  int terms = 0;
  double exponent_per_n = 0.0;
};

PlancherelReport plancherel_check(const PlaneFunction& f, double lambda, int K,
                                  const ReconstructOptions& opts = {});

/// L_lambda f = -Delta f + lambda^2 |z|^2/4 f - i lambda sum (x d_y - y d_x) f.
PlaneFunction twisted_laplacian_apply(const PlaneFunction& f, double lambda,
                                      double tolerance = 1e-6);

/// -i lambda (x d_y - y d_x) f alone, on the grid backend.
GridField angular_term(const GridField& f, double lambda);

struct ScalingOptions {
  int count = 96;
  double base_half_extent = 8.0;
  /// p beyond the estimate's range is evaluated and flagged instead of rejected.
  bool allow_outside_range = false;
};

struct ScalingReport {
  double lambda = 1.0;
  double p = 1.0;
  int k = 0;
  double ratio_at_lambda = 0.0;  // r(lambda)
  double ratio_at_one = 0.0;     // r(1)
  double observed = 0.0;         // r(lambda) / r(1)
  double expected = 0.0;         // lambda^{n(1/p - 3/2)}
  double relative_error = 0.0;
  bool in_estimate_range = true;
  /// r_j(lambda) (2j+n)^{-(n(1/p-1/2)-1/2)} for j = 0..k; reported only.
  std::vector<double> k_curve;
};

/// r(lambda) = ||f_lambda x_lambda phi_k^lambda||_2 / ||f_lambda||_p with
/// f_lambda(u) = f(sqrt(lambda) u), on grids dilated with lambda (n = 1).
ScalingReport projection_scaling_probe(const AnalyticPlane& f, int k, double lambda, double p,
                                       const ScalingOptions& opts = {});

}  // namespace htype
