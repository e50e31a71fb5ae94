#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace htype {

using Complex = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

/// Root of the library's exception hierarchy. Every failure raised by a
/// module derives from this type, so callers can catch one base.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HTYPE_DECLARE_ERROR(Name)        \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

HTYPE_DECLARE_ERROR(UnsupportedDimensionPair);
HTYPE_DECLARE_ERROR(ShapeMismatch);
HTYPE_DECLARE_ERROR(GridTooCoarse);
HTYPE_DECLARE_ERROR(BackendMismatch);
HTYPE_DECLARE_ERROR(TruncationError);
HTYPE_DECLARE_ERROR(ExponentOutOfRange);
HTYPE_DECLARE_ERROR(AliasingError);
HTYPE_DECLARE_ERROR(DomainError);
HTYPE_DECLARE_ERROR(NoBracket);
HTYPE_DECLARE_ERROR(QuadratureError);
HTYPE_DECLARE_ERROR(InsufficientData);
HTYPE_DECLARE_ERROR(NonPositiveValue);
HTYPE_DECLARE_ERROR(InvalidRegime);
HTYPE_DECLARE_ERROR(ParseError);

#undef HTYPE_DECLARE_ERROR

/// Neumaier's variant of Kahan summation. Order of `add` calls fixes the
/// result bit-for-bit, which is what the parallel reductions rely on.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

template <>
inline void CompensatedSum<Complex>::add(Complex x) {
  // componentwise Neumaier
  auto step = [](double& s, double& c, double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v)) {
      c += (s - t) + v;
    } else {
      c += (v - t) + s;
    }
    s = t;
  };
  double sr = sum_.real(), si = sum_.imag();
  double cr = comp_.real(), ci = comp_.imag();
  step(sr, cr, x.real());
  step(si, ci, x.imag());
  sum_ = {sr, si};
  comp_ = {cr, ci};
}

/// Splits [0, count) into contiguous chunks, one per worker thread. Each
/// chunk must write only to its own outputs; results are then independent
/// of the thread count.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

/// Surface area of the unit sphere S^{m-1} in R^m.
double sphere_area(int m);

/// binom(n, k) as a double.
double binomial(int n, int k);

double squared_norm(const std::vector<double>& v);

}  // namespace htype
