#include "htype/group.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace htype {

Matrix::Matrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw ShapeMismatch("matrix data length does not match its shape");
  }
}

Matrix Matrix::identity(int size) {
  Matrix r(size, size);
  for (int i = 0; i < size; ++i) r(i, i) = 1.0;
  return r;
}

Matrix Matrix::transpose() const {
  Matrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) throw ShapeMismatch("matrix product: inner dimensions differ");
  Matrix r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeMismatch("matrix sum: shapes differ");
  Matrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const { return *this + o * -1.0; }

Matrix Matrix::operator*(double s) const {
  Matrix r = *this;
  for (double& x : r.data_) x *= s;
  return r;
}

std::vector<double> Matrix::apply(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != cols_) throw ShapeMismatch("matrix-vector: length mismatch");
  std::vector<double> r(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

Matrix Matrix::kron(const Matrix& inner) const {
  Matrix r(rows_ * inner.rows_, cols_ * inner.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      for (int p = 0; p < inner.rows_; ++p)
        for (int q = 0; q < inner.cols_; ++q)
          r(i * inner.rows_ + p, j * inner.cols_ + q) = (*this)(i, j) * inner(p, q);
  return r;
}

HTypeGroup::HTypeGroup(int n, int m, std::vector<Matrix> u) : n_(n), m_(m), u_(std::move(u)) {
  if (n < 1 || m < 1) throw ShapeMismatch("H-type group needs n >= 1 and m >= 1");
  if (static_cast<int>(u_.size()) != m) {
    throw ShapeMismatch("expected " + std::to_string(m) + " bracket matrices, got " +
                        std::to_string(u_.size()));
  }
}

namespace {

void require_square(const HTypeGroup& g) {
  for (const auto& u : g.u()) {
    if (u.rows() != g.z_dim() || u.cols() != g.z_dim()) {
      throw ShapeMismatch("bracket matrix is " + std::to_string(u.rows()) + "x" +
                          std::to_string(u.cols()) + ", expected " + std::to_string(g.z_dim()) +
                          "x" + std::to_string(g.z_dim()));
    }
  }
}

}  // namespace

void HTypeGroup::check_point(const GroupPoint& g) const {
  if (static_cast<int>(g.z.size()) != z_dim() || static_cast<int>(g.t.size()) != m_) {
    throw ShapeMismatch("group point dimensions do not match the group");
  }
}

std::vector<double> HTypeGroup::bracket(std::span<const double> z, std::span<const double> zp) const {
  require_square(*this);
  if (static_cast<int>(z.size()) != z_dim() || static_cast<int>(zp.size()) != z_dim()) {
    throw ShapeMismatch("bracket arguments must have length 2n");
  }
  std::vector<double> out(m_);
  for (int j = 0; j < m_; ++j) {
    const auto uz = u_[j].apply(zp);
    double s = 0.0;
    for (int i = 0; i < z_dim(); ++i) s += z[i] * uz[i];
    out[j] = s;
  }
  return out;
}

GroupPoint HTypeGroup::multiply(const GroupPoint& g1, const GroupPoint& g2) const {
  check_point(g1);
  check_point(g2);
  const auto br = bracket(g1.z, g2.z);
  GroupPoint r;
  r.z.resize(z_dim());
  r.t.resize(m_);
  for (int i = 0; i < z_dim(); ++i) r.z[i] = g1.z[i] + g2.z[i];
  for (int j = 0; j < m_; ++j) r.t[j] = g1.t[j] + g2.t[j] + 0.5 * br[j];
  return r;
}

GroupPoint HTypeGroup::inverse(const GroupPoint& g) const {
  check_point(g);
  GroupPoint r = g;
  for (double& x : r.z) x = -x;
  for (double& x : r.t) x = -x;
  return r;
}

Matrix HTypeGroup::b_of(std::span<const double> a) const {
  require_square(*this);
  if (static_cast<int>(a.size()) != m_) throw ShapeMismatch("central covector must have length m");
  Matrix b(z_dim(), z_dim());
  for (int j = 0; j < m_; ++j) b = b + u_[j] * a[j];
  return b;
}

double HTypeVerification::max_violation() const {
  return std::max({skewness, orthogonality, anticommutation, complex_structure});
}

HTypeVerification verify_htype_conditions(const HTypeGroup& group, double tolerance) {
  require_square(group);
  HTypeVerification rep;
  rep.tolerance = tolerance;
  const Matrix id = Matrix::identity(group.z_dim());
  for (int j = 0; j < group.m(); ++j) {
    const Matrix& u = group.u(j);
    rep.skewness = std::max(rep.skewness, (u + u.transpose()).max_abs());
    rep.orthogonality = std::max(rep.orthogonality, (u.transpose() * u - id).max_abs());
    for (int i = 0; i < j; ++i) {
      const Matrix& v = group.u(i);
      rep.anticommutation = std::max(rep.anticommutation, (u * v + v * u).max_abs());
    }
  }
  const Matrix& u1 = group.u(0);
  rep.complex_structure = (u1 * u1 + id).max_abs();
  return rep;
}

namespace {

// Factor codes for the 2x2 blocks: 0 = I, 1 = J (skew), 2 = K, 3 = L.
using Word = std::vector<int>;

Matrix block(int code) {
  switch (code) {
    case 0: return Matrix(2, 2, {1, 0, 0, 1});
    case 1: return Matrix(2, 2, {0, -1, 1, 0});
    case 2: return Matrix(2, 2, {1, 0, 0, -1});
    default: return Matrix(2, 2, {0, 1, 1, 0});
  }
}

bool is_skew(const Word& w) {
  return std::count(w.begin(), w.end(), 1) % 2 == 1;
}

// J, K, L pairwise anticommute; I commutes with all. A tensor product
// anticommutes with another iff an odd number of slots anticommute.
bool anticommute(const Word& a, const Word& b) {
  int flips = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0 && b[i] != 0 && a[i] != b[i]) ++flips;
  }
  return flips % 2 == 1;
}

bool extend_clique(const std::vector<Word>& cands, std::vector<int>& chosen, std::size_t start,
                   int target) {
  if (static_cast<int>(chosen.size()) == target) return true;
  for (std::size_t c = start; c < cands.size(); ++c) {
    bool ok = true;
    for (int idx : chosen) {
      if (!anticommute(cands[idx], cands[c])) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    chosen.push_back(static_cast<int>(c));
    if (extend_clique(cands, chosen, c + 1, target)) return true;
    chosen.pop_back();
  }
  return false;
}

std::vector<Word> find_generators(int depth, int m) {
  std::vector<Word> cands;
  const int total = 1 << (2 * depth);
  for (int code = 0; code < total; ++code) {
    Word w(depth);
    int c = code;
    for (int i = depth - 1; i >= 0; --i) {
      w[i] = c % 4;
      c /= 4;
    }
    if (is_skew(w)) cands.push_back(w);
  }
  // U^1 is pinned to J (x) I (x) ... (x) I.
  Word first(depth, 0);
  first[0] = 1;
  const auto it = std::find(cands.begin(), cands.end(), first);
  std::vector<int> chosen{static_cast<int>(it - cands.begin())};
  if (!extend_clique(cands, chosen, 0, m)) return {};
  std::vector<Word> out;
  for (int idx : chosen) out.push_back(cands[idx]);
  return out;
}

}  // namespace

HTypeGroup build_htype_group(int m, int n) {
  if (m < 1 || n < 1) throw UnsupportedDimensionPair("need m >= 1 and n >= 1");
  if (m + 1 > 2 * n) {
    throw UnsupportedDimensionPair("no H-type structure with m = " + std::to_string(m) +
                                   ", n = " + std::to_string(n) + " (requires m + 1 <= 2n)");
  }
  constexpr int kMaxDepth = 4;
  for (int depth = 1; depth <= kMaxDepth; ++depth) {
    const int base = 1 << depth;
    if ((2 * n) % base != 0) break;
    const auto words = find_generators(depth, m);
    if (words.empty()) continue;
    const Matrix pad = Matrix::identity(2 * n / base);
    std::vector<Matrix> u;
    for (const auto& w : words) {
      Matrix mtx = block(w[0]);
      for (int i = 1; i < depth; ++i) mtx = mtx.kron(block(w[i]));
      u.push_back(mtx.kron(pad));
    }
    return HTypeGroup(n, m, std::move(u));
  }
  throw UnsupportedDimensionPair("no tensor-product construction for m = " + std::to_string(m) +
                                 ", n = " + std::to_string(n));
}

}  // namespace htype
