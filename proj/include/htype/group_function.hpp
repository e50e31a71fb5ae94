#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "htype/common.hpp"
#include "htype/grid.hpp"
#include "htype/group.hpp"
#include "htype/hermite.hpp"

namespace htype {

/// A function on G given through its central Fourier transform,
///   f^a(z) = amplitude(a) * profile(|a|, |z|),
/// so f(z, t) = (2 pi)^{-m} int f^a(z) e^{-i<a,t>} da.
struct SpectralGroupFunction {
  int n = 1;
  int m = 1;
  std::function<Complex(std::span<const double>)> amplitude;
  std::function<double(double rho, double r)> profile;
  /// |z| beyond which profile(rho, .) is negligible; constant 8 when unset.
  std::function<double(double rho)> z_radius;
  /// amplitude vanishes (or is negligible) for |a| outside [a_min, a_max].
  double a_min = 0.0;
  double a_max = 10.0;
  std::string label;

  double radius_at(double rho) const { return z_radius ? z_radius(rho) : 8.0; }
};

class GroupFunction {
 public:
  enum class Backend { Grid, Spectral };

  /// Samples on a Cartesian grid with axes (x_1..x_n, y_1..y_n, t_1..t_m).
  static GroupFunction grid(int n, int m, GridField f);
  static GroupFunction spectral(SpectralGroupFunction f);

  Backend backend() const { return static_cast<Backend>(data_.index()); }
  int n() const { return n_; }
  int m() const { return m_; }
  const GridField& grid_field() const;
  const SpectralGroupFunction& spectral_form() const;

 private:
  int n_ = 1;
  int m_ = 1;
  std::variant<GridField, SpectralGroupFunction> data_;
};

/// Values on the product of z-radii and t-points; value(i, j) belongs to
/// (radii[i], t_point(j)). Used for outputs of spectral-backend operations.
struct GroupSamples {
  int n = 1;
  int m = 1;
  std::vector<double> radii;
  std::vector<double> t_points;  // row-major, t_count() * m
  std::vector<Complex> values;

  std::size_t t_count() const { return m > 0 ? t_points.size() / m : 0; }
  std::span<const double> t_point(std::size_t j) const {
    return {t_points.data() + j * m, static_cast<std::size_t>(m)};
  }
  Complex& at(std::size_t i, std::size_t j) { return values[i * t_count() + j]; }
  Complex at(std::size_t i, std::size_t j) const { return values[i * t_count() + j]; }
};

GroupSamples make_samples(int n, int m, std::vector<double> radii, std::vector<double> t_points);

/// Weights |S^{2n-1}| r_i^{2n-1} times the trapezoid weight of r_i.
std::vector<double> radial_weights(const GroupSamples& s);

/// sum |v|^2 w_i over the samples, w_i = |S^{2n-1}| r_i^{2n-1} times the
/// trapezoid weight of r_i; t-points count with unit weight.
double sample_norm2(const GroupSamples& s);
double relative_sample_error(const GroupSamples& f, const GroupSamples& reference);

/// f^a(z) = int f(z,t) e^{i<a,t>} dt. Grid functions (n = 1) give a grid
/// PlaneFunction; spectral ones a radial closed form.
PlaneFunction central_fourier(const GroupFunction& f, std::span<const double> a);

/// f(z, t) = exp(-|z|^2/4 - |t|^2/2), i.e. f^a(z) = (2 pi)^{m/2} e^{-|a|^2/2} e^{-|z|^2/4}.
SpectralGroupFunction gaussian_group_function(int n, int m);

/// Direct evaluation of a spectral function at (|z|, t) by polar quadrature
/// in a: `radial_panels` panels of Gauss-Legendre(20) on [a_min, a_max]
/// times the sphere rule of the given resolution.
GroupSamples evaluate(const SpectralGroupFunction& f, const std::vector<double>& radii,
                      const std::vector<double>& t_points, int radial_panels = 16,
                      int sphere_resolution = 24, std::uint64_t seed = 1);

/// Samples a spectral function onto a grid group function (n = 1).
GroupFunction sample_on_grid(const SpectralGroupFunction& f, const TensorGrid& grid, int radial_panels = 16,
                      int sphere_resolution = 24, std::uint64_t seed = 1);

/// f * e^a_k = e^{-i<a,t>} (f^a x phi_k^{|a|})(z), with the twist taken in the
/// orientation of B(a) = sum_j a_j U^j. Grid backend, n = 1.
GroupFunction joint_eigenfunction_convolve(const HTypeGroup& group, const GroupFunction& f, int k,
                                           std::span<const double> a,
                                           const ConvolutionOptions& opts = {});

}  // namespace htype
