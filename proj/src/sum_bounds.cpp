#include <cmath>

#include "htype/common.hpp"
#include "htype/estimate.hpp"

namespace htype {

double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0)) throw DomainError("Hurwitz zeta needs s > 1");
  if (!(a > 0.0)) throw DomainError("Hurwitz zeta needs a > 0");
  // B_2k / (2k)!
  static const double b[] = {1.0 / 12.0,        -1.0 / 720.0,       1.0 / 30240.0,
                             -1.0 / 1209600.0,  1.0 / 47900160.0,   -5.284190138687493e-10,
                             1.3382536530684679e-11, -3.3896802963225827e-13};
  const int N = 12;
  CompensatedSum<double> sum;
  for (int j = 0; j < N; ++j) sum.add(std::pow(a + j, -s));
  const double x = a + N;
  sum.add(std::pow(x, 1.0 - s) / (s - 1.0));
  sum.add(0.5 * std::pow(x, -s));
  // s (s+1) ... (s+2k-2) x^{-s-2k+1}
  double rising = s;
  double power = std::pow(x, -s - 1.0);
  for (int k = 0; k < 8; ++k) {
    sum.add(b[k] * rising * power);
    rising *= (s + 2 * k + 1) * (s + 2 * k + 2);
    power /= x * x;
  }
  return sum.value();
}

namespace {

// sum over k >= 0 with 2k + n >= A of (2k+n)^nu, nu < -1
double tail_sum(double nu, int n, double A) {
  const double k0 = std::max(0.0, std::ceil((A - n) / 2.0));
  return std::pow(2.0, nu) * hurwitz_zeta(-nu, k0 + 0.5 * n);
}

// sum over k >= 0 with 2k + n <= A of (2k+n)^nu
double head_sum(double nu, int n, double A) {
  CompensatedSum<double> s;
  for (long k = 0; 2.0 * k + n <= A; ++k) s.add(std::pow(2.0 * k + n, nu));
  return s.value();
}

}  // namespace

SumBoundReport sum_bound_check(double nu, int n, const std::vector<double>& a_values) {
  if (nu == -1.0) throw ExponentOutOfRange("nu = -1 has no power bound (logarithmic growth)");
  if (n < 1) throw DomainError("n must be >= 1");
  if (a_values.empty()) throw InsufficientData("no A values");
  SumBoundReport r;
  r.nu = nu;
  r.n = n;
  r.tail_form = nu < -1.0;
  r.a_values = a_values;
  auto ratio_at = [&](double A, double& sum) {
    if (!(A > 0)) throw DomainError("A must be positive");
    sum = r.tail_form ? tail_sum(nu, n, A) : head_sum(nu, n, A);
    return sum / std::pow(A, nu + 1.0);
  };
  double a_max = 0.0;
  for (double A : a_values) {
    double s = 0.0;
    const double q = ratio_at(A, s);
    r.sums.push_back(s);
    r.ratios.push_back(q);
    r.max_ratio = std::max(r.max_ratio, q);
    a_max = std::max(a_max, A);
  }
  // extension: ten log-spaced points on (a_max, 10 a_max]
  r.extended_max_ratio = r.max_ratio;
  for (int i = 1; i <= 10; ++i) {
    double s = 0.0;
    r.extended_max_ratio =
        std::max(r.extended_max_ratio, ratio_at(a_max * std::pow(10.0, i / 10.0), s));
  }
  r.bounded = std::isfinite(r.max_ratio) && r.extended_max_ratio <= 1.01 * r.max_ratio;
  return r;
}

}  // namespace htype
