#pragma once

#include <functional>
#include <span>
#include <vector>

#include "htype/common.hpp"
#include "htype/group.hpp"

namespace htype {

/// Uniform periodic axis on [-half_extent, half_extent) with points
/// (i - count/2) * spacing. The origin is always a grid point.
struct Axis {
  int count = 64;
  double half_extent = 8.0;

  double spacing() const { return 2.0 * half_extent / count; }
  double point(int i) const { return (i - count / 2) * spacing(); }
};

class TensorGrid {
 public:
  TensorGrid() = default;
  explicit TensorGrid(std::vector<Axis> axes);

  int dims() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int d) const { return axes_.at(d); }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int d) const { return strides_[d]; }
  double cell_volume() const;

  /// Multi-index of a flat index (row-major, axis 0 slowest).
  void unflatten(std::size_t flat, std::span<int> idx) const;
  void coordinates(std::size_t flat, std::span<double> x) const;

  bool same_as(const TensorGrid& other) const;

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

struct GridField {
  TensorGrid grid;
  std::vector<Complex> values;

  GridField() = default;
  explicit GridField(TensorGrid g) : grid(std::move(g)), values(grid.size()) {}
};

GridField sample_field(const TensorGrid& grid,
                       const std::function<Complex(std::span<const double>)>& fn);

/// d^order/dx_axis^order by FFT along one axis. Odd orders drop the
/// Nyquist mode.
GridField spectral_derivative(const GridField& f, int axis, int order);

/// sqrt of the fraction of spectral energy along `axis` carried by modes
/// above two thirds of Nyquist. Used as the derivative truncation estimate.
double high_mode_fraction(const GridField& f, int axis);

/// Throws GridTooCoarse when any axis exceeds `tolerance`.
void require_resolved(const GridField& f, double tolerance);

double l2_norm(const GridField& f);
Complex inner_product(const GridField& f, const GridField& g);
/// ||f - g|| / ||g||
double relative_l2_error(const GridField& f, const GridField& g);

void axpy(Complex a, const GridField& x, GridField& y);
GridField scaled(const GridField& f, Complex a);

/// Operators on functions of (z, t): grid axes are x_1..x_n, y_1..y_n,
/// t_1..t_m in that order.
struct GroupOperator {
  enum class Kind { Sublaplacian, Central, Full, X, Y, T };
  Kind kind = Kind::Sublaplacian;
  int index = 0;  // 0-based, for X, Y and T

  static GroupOperator sublaplacian() { return {Kind::Sublaplacian, 0}; }
  static GroupOperator central() { return {Kind::Central, 0}; }
  static GroupOperator full() { return {Kind::Full, 0}; }
  static GroupOperator x(int j) { return {Kind::X, j}; }
  static GroupOperator y(int j) { return {Kind::Y, j}; }
  static GroupOperator t(int k) { return {Kind::T, k}; }
};

/// Discrete action of L, T, Delta = L + T or a single vector field.
/// `tolerance` bounds high_mode_fraction on every axis.
GridField apply_operator(const HTypeGroup& group, GroupOperator op, const GridField& f,
                         double tolerance = 1e-6);

TensorGrid group_grid(const HTypeGroup& group, int z_count = 64, double z_half = 8.0,
                      int t_count = 64, double t_half = 16.0);

}  // namespace htype
