#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "htype/group_function.hpp"
#include "htype/joint_calculus.hpp"

namespace htype {

/// psi = 0 outside (a, d), psi = 1 on [b, c], smooth steps in between.
struct BumpKnots {
  double a = 0.5;
  double b = 1.0;
  double c = 4.0;
  double d = 8.0;
};

/// {n/4, n/2, 2n, 4n}.
BumpKnots default_knots(int n);

/// 0 for u <= 0, 1 for u >= 1: the normalized integral of the mollifier
/// exp(-1/(1-x^2)) over [-1, 2u-1].
double smooth_step(double u);

double bump(const BumpKnots& k, double x);

/// h(s) = amplitude * exp(-|s - center|^2 / (2 sigma^2)) on R^m.
struct GaussianSeed {
  double sigma = 1.0;
  std::vector<double> center;
  double amplitude = 1.0;

  int dim() const { return static_cast<int>(center.size()); }
};

/// sigma uniform in [0.7, 1.3], center uniform in [-1, 1]^m.
GaussianSeed random_gaussian_seed(int m, std::uint64_t seed);

double gaussian_value(const GaussianSeed& h, std::span<const double> s);
/// int h(s) e^{+i<xi,s>} ds.
Complex gaussian_hat(const GaussianSeed& h, std::span<const double> xi);
double gaussian_lp_norm(const GaussianSeed& h, double p);

/// int_{S^{m-1}} e^{-i x <w, t>} dsigma(w) = (2 pi)^{m/2} x^{1-m/2} J_{m/2-1}(x), x = |t|.
double sphere_fourier_kernel(int m, double x);

/// The test pair
///   f(z,t) = int psi(|a|) h^(a) e^{-|a||z|^2/4} e^{-i<a,t>} |a|^n da,
///   g(z,t) = the same with h^ = 1,
/// so f = h *_t g and P^Delta_{2n^2} f is explicit.
struct SharpnessInstance {
  int n = 2;
  int m = 3;
  BumpKnots knots;
  GaussianSeed h;
  SpectralGroupFunction f;
  SpectralGroupFunction g;
};

SharpnessInstance build_sharpness_instance(int n, int m, const BumpKnots& knots,
                                           const GaussianSeed& h);

/// r^{m-1} int_{S^{m-1}} h^(r w) e^{-i r <w,t>} dsigma(w) = (h * (dsigma_r)^)(t),
/// by the sphere rule; QuadratureError when node doubling moves the result by
/// more than `tolerance` relative.
std::vector<Complex> sphere_measure_convolve(const std::function<Complex(std::span<const double>)>& h_hat,
                                             int m, double r, const std::vector<double>& t_points,
                                             int sphere_resolution = 32, std::uint64_t seed = 1,
                                             double tolerance = 1e-6);

/// Closed form of the same for a Gaussian seed (Bessel route).
Complex gaussian_sphere_convolution(const GaussianSeed& h, double r, std::span<const double> t);

/// Functions on G radial in z and in t - center, tabulated on Gauss-Legendre
/// nodes in r = |z| and tau = |t - center|. Weights carry the polar Jacobians.
struct RadialTable {
  int n = 1;
  int m = 1;
  std::vector<double> r, r_weights;
  std::vector<double> tau, tau_weights;
  std::vector<double> values;  // r-major
  /// Points per tau panel when tau is a composite Gauss-Legendre rule on
  /// [0, tau_max]; 0 otherwise.
  int tau_order = 0;
  double tau_max = 0.0;

  double at(std::size_t i, std::size_t j) const { return values[i * tau.size() + j]; }
};

struct TableSpec {
  double r_max = 13.0;
  int r_panels = 48;
  double tau_max = 160.0;
  int tau_panels = 320;
  /// |a|-panel width times tau_max: radians of e^{-i<a,t>} per panel at the
  /// largest tau.
  double rho_panel_phase = 4.0;
  int order = 12;

  TableSpec doubled() const;
};

/// f (centered at the seed's center) or g on a radial table, by
/// Gauss-Legendre quadrature in |a| over the bump's support. GridTooCoarse
/// when a tau panel spans more than 4 radians of e^{-i<a,t>}.
RadialTable sharpness_table(const SharpnessInstance& inst, bool with_seed, const TableSpec& spec);

/// One value of the same radial function by an independent adaptive route.
double sharpness_radial_value(const SharpnessInstance& inst, bool with_seed, double r, double tau,
                              int rho_panels = 256);

/// (int_z (int_t |g| dt)^p dz)^{1/p}. On composite tau rules the inner
/// integral splits each panel's interpolant at its sign changes, so the
/// kinks of |g| do not limit the accuracy.
double mixed_norm(const RadialTable& g, double p);
/// Grid backend: t-axes are summed inside, z-axes outside.
double mixed_norm(const GroupFunction& g, double p);

/// ||f||_{L^p(G)}.
double lp_norm(const RadialTable& f, double p);

struct SharpnessGrid {
  int radii = 12;
  double r_max = 6.0;
  int t_per_axis = 5;
  double t_extent = 4.0;  // samples t - center on [-t_extent, t_extent]^m
  int sphere_resolution = 6;
  int qmc_points = 4096;

  SharpnessGrid doubled() const;
  SampleLayout layout(const SharpnessInstance& inst) const;
};

struct SharpnessReport {
  double gap = 0.0;          // relative L2 gap, projection vs closed form
  double psi_at_n = 0.0;
  double projection_norm = 0.0;
  double closed_form_norm = 0.0;
  double separability = 0.0;  // max relative spread of P f / e^{-n|z|^2/4} over z
  double sphere_residual = 0.0;
  int k_used = 0;
  GroupSamples projection;
  GroupSamples closed_form;
};

/// Evaluates P^Delta_{2n^2} f through the spectral restriction and compares it
/// with (1/3) n^{n-1} e^{-n|z|^2/4} (h * (dsigma_n)^)(t).
SharpnessReport verify_sharpness_identity(const SharpnessInstance& inst, const SharpnessGrid& grid = {});

/// ||v||_{L^q} over a sample layout: radial weights in z, unit weights in t.
double sample_lq_norm(const GroupSamples& s, double q);

/// ||P f||_q / ||h * (dsigma_n)^||_q, the latter over the layout's t-points
/// (read off the closed form's r = 0 row). Independent of h when the identity
/// holds: it is then (1/3) n^{n-1} ||e^{-n|z|^2/4}||_q.
double sharpness_norm_ratio(const SharpnessReport& rep, double q);

}  // namespace htype
