#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <gsl/gsl_sf_laguerre.h>

#include "htype/laguerre.hpp"
#include "htype/quadrature.hpp"

using namespace htype;
using Big = boost::multiprecision::cpp_bin_float_100;

namespace {

// sum_{i<=k} (-1)^i binom(k+a, k-i) x^i / i! in 100-digit arithmetic
Big series(int k, int a, double x) {
  Big sum = 0, term_x = 1;
  for (int i = 0; i <= k; ++i) {
    Big binom = 1;
    for (int j = 1; j <= k - i; ++j) binom = binom * Big(a + i + j) / Big(j);
    const Big t = binom * term_x;
    sum += (i % 2 == 0) ? t : Big(-t);
    term_x = term_x * Big(x) / Big(i + 1);
  }
  return sum;
}

}  // namespace

TEST_CASE("low degrees") {
  for (double a : {0.0, 1.0, 3.5}) {
    for (double x : {0.0, 0.7, 9.0}) {
      CHECK(laguerre_poly(0, a, x) == 1.0);
      CHECK(laguerre_poly(1, a, x) == doctest::Approx(1.0 + a - x));
    }
  }
  CHECK(laguerre_poly(1, 1.0, 2.0) == 0.0);
}

TEST_CASE("L_5^2(3.7) against the extended-precision series") {
  const double ref = static_cast<double>(series(5, 2, 3.7));
  CHECK(std::abs(laguerre_poly(5, 2.0, 3.7) - ref) <= 1e-12 * std::abs(ref));
}

TEST_CASE("recurrence against the series for k <= 50, order <= 7, x in [0, 100]") {
  double worst = 0.0;
  for (int a = 0; a <= 7; ++a) {
    for (double x = 0.0; x <= 100.0; x += 1.37) {
      std::vector<double> seq(51);
      laguerre_sequence(a, x, seq);
      for (int k = 0; k <= 50; ++k) {
        const double ref = static_cast<double>(series(k, a, x));
        const double rel = std::abs(seq[k] - ref) / std::abs(ref);
        worst = std::max(worst, rel);
        CHECK(laguerre_poly(k, a, x) == seq[k]);
      }
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("agrees with GSL on moderate arguments") {
  for (int k : {3, 17, 40}) {
    for (double a : {0.0, 2.5, 6.0}) {
      for (double x : {0.1, 4.0, 30.0}) {
        const double ref = gsl_sf_laguerre_n(k, a, x);
        CHECK(laguerre_poly(k, a, x) == doctest::Approx(ref).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("Laguerre functions") {
  for (int n : {1, 2, 4}) CHECK(laguerre_function(0, n, 1.3, 2.0) == doctest::Approx(std::exp(-1.3 * 2.0 / 4)));
  CHECK(laguerre_function(3, 2, 1.0, 0.0) == doctest::Approx(4.0));
  CHECK(std::abs(laguerre_function(1, 1, 2.0, 1.0)) <= 1e-16);
  std::vector<double> seq(8);
  laguerre_function_sequence(2, 0.8, 3.1, seq);
  for (int k = 0; k < 8; ++k) CHECK(seq[k] == doctest::Approx(laguerre_function(k, 2, 0.8, 3.1)));
}

TEST_CASE("norms and orthogonality by radial quadrature") {
  for (int n : {1, 2, 3}) {
    const double lambda = 0.7;
    const QuadratureRule rule = radial_rule(n, 40.0, 40);
    for (int k = 0; k <= 6; ++k) {
      for (int j = 0; j <= 6; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
          const double r2 = rule.nodes[i] * rule.nodes[i];
          s += rule.weights[i] * laguerre_function(k, n, lambda, r2) * laguerre_function(j, n, lambda, r2);
        }
        const double expect = k == j ? laguerre_function_norm2(k, n, lambda) : 0.0;
        CHECK(std::abs(s - expect) <= 1e-10 * laguerre_function_norm2(k, n, lambda));
      }
    }
  }
}
