#pragma once

#include <span>
#include <vector>

#include "htype/common.hpp"

namespace htype {

/// Dense row-major real matrix. Only what the bracket matrices need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}
  Matrix(int rows, int cols, std::vector<double> data);

  static Matrix identity(int size);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }

  Matrix transpose() const;
  Matrix operator*(const Matrix& other) const;
  Matrix operator+(const Matrix& other) const;
  Matrix operator-(const Matrix& other) const;
  Matrix operator*(double s) const;
  std::vector<double> apply(std::span<const double> v) const;
  double max_abs() const;

  /// Kronecker product with `this` as the outer factor.
  Matrix kron(const Matrix& inner) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct GroupPoint {
  std::vector<double> z;  // x_1..x_n, y_1..y_n
  std::vector<double> t;
};

/// H-type group on R^{2n} x R^m, given by the bracket matrices U^1..U^m
/// with [z, z']_j = <z, U^j z'>. The constructor checks shapes only; use
/// verify_htype_conditions for the algebraic conditions.
class HTypeGroup {
 public:
  HTypeGroup(int n, int m, std::vector<Matrix> u);

  int n() const { return n_; }
  int m() const { return m_; }
  int z_dim() const { return 2 * n_; }
  const std::vector<Matrix>& u() const { return u_; }
  const Matrix& u(int j) const { return u_.at(j); }

  std::vector<double> bracket(std::span<const double> z, std::span<const double> zp) const;
  GroupPoint multiply(const GroupPoint& g1, const GroupPoint& g2) const;
  GroupPoint inverse(const GroupPoint& g) const;

  /// B(a) = sum_j a_j U^j, the skew map attached to a central covector.
  Matrix b_of(std::span<const double> a) const;

  void check_point(const GroupPoint& g) const;

 private:
  int n_;
  int m_;
  std::vector<Matrix> u_;
};

struct HTypeVerification {
  double skewness = 0.0;        // max |U + U^T|
  double orthogonality = 0.0;   // max |U^T U - I|
  double anticommutation = 0.0; // max |U^i U^j + U^j U^i|, i != j
  double complex_structure = 0.0; // max |(U^1)^2 + I|: spectrum of U^1 is {+-i}
  double tolerance = 1e-12;

  double max_violation() const;
  bool passed() const { return max_violation() <= tolerance; }
};

/// Builds U^1..U^m from tensor products of the 2x2 blocks I, J, K, L.
/// U^1 = J (x) I_n, i.e. <z, U^1 z'> = sum_j (x'_j y_j - y'_j x_j).
HTypeGroup build_htype_group(int m, int n);

HTypeVerification verify_htype_conditions(const HTypeGroup& group, double tolerance = 1e-12);

}  // namespace htype
