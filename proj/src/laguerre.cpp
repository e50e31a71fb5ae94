#include "htype/laguerre.hpp"

#include <cmath>
#include <vector>

#include "htype/common.hpp"

namespace htype {

namespace {

void check_args(int k, double a, double x) {
  if (std::isnan(a) || std::isnan(x)) throw DomainError("Laguerre evaluation at NaN");
  if (k < 0) throw DomainError("Laguerre degree must be non-negative");
  if (!(a > -1.0)) throw DomainError("Laguerre order must exceed -1");
}

}  // namespace

double laguerre_poly(int k, double a, double x) {
  check_args(k, a, x);
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + a - x;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 + a - x) * cur - (j + a) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void laguerre_sequence(double a, double x, std::span<double> out) {
  if (out.empty()) return;
  check_args(static_cast<int>(out.size()) - 1, a, x);
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = 1.0 + a - x;
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    out[j + 1] = ((2.0 * j + 1.0 + a - x) * out[j] - (j + a) * out[j - 1]) / (j + 1.0);
  }
}

double laguerre_function(int k, int n, double lambda, double r2) {
  std::vector<double> seq(k + 1);
  laguerre_function_sequence(n, lambda, r2, seq);
  return seq[k];
}

double phi(int k, int n, double lambda, std::span<const double> z) {
  if (static_cast<int>(z.size()) != 2 * n) throw ShapeMismatch("phi: point must lie in R^{2n}");
  double r2 = 0.0;
  for (double v : z) r2 += v * v;
  return laguerre_function(k, n, lambda, r2);
}

void laguerre_function_sequence(int n, double lambda, double r2, std::span<double> out) {
  if (out.empty()) return;
  const double a = n - 1.0;
  const double x = 0.5 * lambda * r2;
  check_args(static_cast<int>(out.size()) - 1, a, x);
  // Recurrence in rescaled variables so that large x neither overflows the
  // polynomial nor underflows the Gaussian before the product is formed.
  double log_scale = -0.5 * x;
  double prev = 1.0;
  double cur = 1.0 + a - x;
  double factor = std::exp(log_scale);
  out[0] = factor;
  if (out.size() > 1) out[1] = cur * factor;
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    const double next = ((2.0 * j + 1.0 + a - x) * cur - (j + a) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150) {
      prev *= 1e-150;
      cur *= 1e-150;
      log_scale += 150.0 * std::log(10.0);
      factor = std::exp(log_scale);
    }
    out[j + 1] = cur * factor;
  }
}

double laguerre_function_norm2(int k, int n, double lambda) {
  return std::pow(2.0 * kPi / lambda, n) * binomial(k + n - 1, k);
}

}  // namespace htype
