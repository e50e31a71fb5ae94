#include "htype/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <string>

namespace htype {

TensorGrid::TensorGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  for (int d = dims() - 1; d >= 0; --d) {
    if (axes_[d].count < 2 || axes_[d].count % 2 != 0 || !(axes_[d].half_extent > 0)) {
      throw ShapeMismatch("grid axes need an even point count >= 2 and positive extent");
    }
    strides_[d] = size_;
    size_ *= static_cast<std::size_t>(axes_[d].count);
  }
}

double TensorGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.spacing();
  return v;
}

void TensorGrid::unflatten(std::size_t flat, std::span<int> idx) const {
  for (int d = 0; d < dims(); ++d) {
    idx[d] = static_cast<int>(flat / strides_[d]);
    flat %= strides_[d];
  }
}

void TensorGrid::coordinates(std::size_t flat, std::span<double> x) const {
  for (int d = 0; d < dims(); ++d) {
    const int i = static_cast<int>(flat / strides_[d]);
    flat %= strides_[d];
    x[d] = axes_[d].point(i);
  }
}

bool TensorGrid::same_as(const TensorGrid& other) const {
  if (dims() != other.dims()) return false;
  for (int d = 0; d < dims(); ++d) {
    if (axes_[d].count != other.axes_[d].count ||
        axes_[d].half_extent != other.axes_[d].half_extent) {
      return false;
    }
  }
  return true;
}

GridField sample_field(const TensorGrid& grid,
                       const std::function<Complex(std::span<const double>)>& fn) {
  GridField out(grid);
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(grid.dims());
    for (std::size_t i = begin; i < end; ++i) {
      grid.coordinates(i, x);
      out.values[i] = fn(x);
    }
  });
  return out;
}

namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

// FFTW planning is not thread-safe; execution with new-array calls is.
const PlanPair& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    fftw_complex* buf = fftw_alloc_complex(n);
    PlanPair p{fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE),
               fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE)};
    fftw_free(buf);
    it = cache.emplace(n, p).first;
  }
  return it->second;
}

// Signed frequency index of FFT bin j.
int signed_mode(int j, int n) { return j <= n / 2 ? j : j - n; }

// Calls body(line_buffer) for every 1-D line of `f` along `axis`, after a
// forward transform; if `write_back`, the buffer is inverse transformed and
// stored into `out`.
template <typename Body>
void for_each_line(const GridField& f, int axis, GridField* out, Body body) {
  const TensorGrid& g = f.grid;
  const int n = g.axis(axis).count;
  const std::size_t stride = g.stride(axis);
  const std::size_t outer = g.size() / (stride * n);
  const std::size_t lines = outer * stride;
  const PlanPair& plans = plans_for(n);
  parallel_for(lines, [&](std::size_t begin, std::size_t end) {
    fftw_complex* buf = fftw_alloc_complex(n);
    auto* cbuf = reinterpret_cast<Complex*>(buf);
    for (std::size_t line = begin; line < end; ++line) {
      const std::size_t o = line / stride;
      const std::size_t inner = line % stride;
      const std::size_t base = o * stride * n + inner;
      for (int j = 0; j < n; ++j) cbuf[j] = f.values[base + j * stride];
      fftw_execute_dft(plans.forward, buf, buf);
      body(cbuf, n);
      if (out != nullptr) {
        fftw_execute_dft(plans.backward, buf, buf);
        for (int j = 0; j < n; ++j) out->values[base + j * stride] = cbuf[j] / double(n);
      }
    }
    fftw_free(buf);
  });
}

}  // namespace

GridField spectral_derivative(const GridField& f, int axis, int order) {
  if (axis < 0 || axis >= f.grid.dims()) throw ShapeMismatch("derivative axis out of range");
  GridField out(f.grid);
  const Axis& ax = f.grid.axis(axis);
  const double dk = 2.0 * kPi / (ax.count * ax.spacing());
  std::vector<Complex> mult(ax.count);
  for (int j = 0; j < ax.count; ++j) {
    const int s = signed_mode(j, ax.count);
    if (order % 2 == 1 && j == ax.count / 2) {
      mult[j] = 0.0;
      continue;
    }
    mult[j] = std::pow(Complex(0.0, s * dk), order);
  }
  for_each_line(f, axis, &out, [&](Complex* line, int n) {
    for (int j = 0; j < n; ++j) line[j] *= mult[j];
  });
  return out;
}

double high_mode_fraction(const GridField& f, int axis) {
  const int n = f.grid.axis(axis).count;
  std::mutex mu;
  double high = 0.0, total = 0.0;
  // Lines are visited in a fixed order per chunk; the ratio is a diagnostic
  // so the cross-chunk accumulation order does not need to be fixed.
  for_each_line(f, axis, nullptr, [&](Complex* line, int len) {
    double h = 0.0, t = 0.0;
    for (int j = 0; j < len; ++j) {
      const double e = std::norm(line[j]);
      t += e;
      if (3 * std::abs(signed_mode(j, n)) > n) h += e;
    }
    std::lock_guard<std::mutex> lock(mu);
    high += h;
    total += t;
  });
  return total > 0.0 ? std::sqrt(high / total) : 0.0;
}

void require_resolved(const GridField& f, double tolerance) {
  for (int d = 0; d < f.grid.dims(); ++d) {
    const double r = high_mode_fraction(f, d);
    if (r > tolerance) {
      throw GridTooCoarse("axis " + std::to_string(d) + " high-mode fraction " + std::to_string(r) +
                          " exceeds tolerance " + std::to_string(tolerance));
    }
  }
}

double l2_norm(const GridField& f) {
  CompensatedSum<double> s;
  for (const auto& v : f.values) s.add(std::norm(v));
  return std::sqrt(s.value() * f.grid.cell_volume());
}

Complex inner_product(const GridField& f, const GridField& g) {
  if (!f.grid.same_as(g.grid)) throw ShapeMismatch("inner product of fields on different grids");
  CompensatedSum<Complex> s;
  for (std::size_t i = 0; i < f.values.size(); ++i) s.add(f.values[i] * std::conj(g.values[i]));
  return s.value() * f.grid.cell_volume();
}

double relative_l2_error(const GridField& f, const GridField& g) {
  if (!f.grid.same_as(g.grid)) throw ShapeMismatch("comparing fields on different grids");
  CompensatedSum<double> num, den;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    num.add(std::norm(f.values[i] - g.values[i]));
    den.add(std::norm(g.values[i]));
  }
  return den.value() > 0.0 ? std::sqrt(num.value() / den.value()) : std::sqrt(num.value());
}

void axpy(Complex a, const GridField& x, GridField& y) {
  if (!x.grid.same_as(y.grid)) throw ShapeMismatch("axpy on fields on different grids");
  for (std::size_t i = 0; i < x.values.size(); ++i) y.values[i] += a * x.values[i];
}

GridField scaled(const GridField& f, Complex a) {
  GridField out = f;
  for (auto& v : out.values) v *= a;
  return out;
}

namespace {

// Multiplies f pointwise by a real coefficient field c(z) (z = first 2n axes).
void add_weighted(GridField& acc, const GridField& f, int z_dim, double scale,
                  const std::function<double(std::span<const double>)>& coeff) {
  const TensorGrid& g = f.grid;
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(g.dims());
    for (std::size_t i = begin; i < end; ++i) {
      g.coordinates(i, x);
      acc.values[i] += scale * coeff(std::span<const double>(x.data(), z_dim)) * f.values[i];
    }
  });
}

}  // namespace

GridField apply_operator(const HTypeGroup& group, GroupOperator op, const GridField& f,
                         double tolerance) {
  const int zd = group.z_dim();
  const int m = group.m();
  if (f.grid.dims() != zd + m) {
    throw ShapeMismatch("field has " + std::to_string(f.grid.dims()) + " axes, group needs " +
                        std::to_string(zd + m));
  }
  require_resolved(f, tolerance);
  const int n = group.n();

  auto central_laplacian = [&] {
    GridField out(f.grid);
    for (int k = 0; k < m; ++k) axpy(-1.0, spectral_derivative(f, zd + k, 2), out);
    return out;
  };

  // X_i = d/dz_i + 1/2 sum_k (U^k^T z)_i T_k, i over all 2n coordinates.
  auto horizontal = [&](int i) {
    GridField out = spectral_derivative(f, i, 1);
    for (int k = 0; k < m; ++k) {
      const Matrix& u = group.u(k);
      const GridField tk = spectral_derivative(f, zd + k, 1);
      add_weighted(out, tk, zd, 0.5, [&](std::span<const double> z) {
        double s = 0.0;
        for (int l = 0; l < zd; ++l) s += z[l] * u(l, i);
        return s;
      });
    }
    return out;
  };

  switch (op.kind) {
    case GroupOperator::Kind::X:
      if (op.index < 0 || op.index >= n) throw ShapeMismatch("X_j index out of range");
      return horizontal(op.index);
    case GroupOperator::Kind::Y:
      if (op.index < 0 || op.index >= n) throw ShapeMismatch("Y_j index out of range");
      return horizontal(n + op.index);
    case GroupOperator::Kind::T:
      if (op.index < 0 || op.index >= m) throw ShapeMismatch("T_k index out of range");
      return spectral_derivative(f, zd + op.index, 1);
    case GroupOperator::Kind::Central:
      return central_laplacian();
    case GroupOperator::Kind::Sublaplacian:
    case GroupOperator::Kind::Full:
      break;
  }

  // L = -Delta_z + |z|^2/4 T - sum_k <z, U^k grad_z> T_k
  GridField out(f.grid);
  for (int i = 0; i < zd; ++i) axpy(-1.0, spectral_derivative(f, i, 2), out);
  const GridField tf = central_laplacian();
  add_weighted(out, tf, zd, 0.25, [](std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return s;
  });
  for (int k = 0; k < m; ++k) {
    const Matrix& u = group.u(k);
    const GridField tk = spectral_derivative(f, zd + k, 1);
    for (int l = 0; l < zd; ++l) {
      // coefficient of d/dz_l is (U^k^T z)_l
      const GridField d = spectral_derivative(tk, l, 1);
      add_weighted(out, d, zd, -1.0, [&](std::span<const double> z) {
        double s = 0.0;
        for (int i = 0; i < zd; ++i) s += z[i] * u(i, l);
        return s;
      });
    }
  }
  if (op.kind == GroupOperator::Kind::Full) axpy(1.0, tf, out);
  return out;
}

TensorGrid group_grid(const HTypeGroup& group, int z_count, double z_half, int t_count,
                      double t_half) {
  std::vector<Axis> axes;
  for (int i = 0; i < group.z_dim(); ++i) axes.push_back({z_count, z_half});
  for (int k = 0; k < group.m(); ++k) axes.push_back({t_count, t_half});
  return TensorGrid(std::move(axes));
}

}  // namespace htype
