#include "htype/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <mutex>

#include "htype/common.hpp"

namespace htype {

namespace {

const QuadratureRule& reference_rule(int order) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  QuadratureRule rule;
  const auto zeros = boost::math::legendre_p_zeros<double>(order);
  auto add = [&](double x) {
    const double dp = boost::math::legendre_p_prime(order, x);
    rule.nodes.push_back(x);
    rule.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  };
  // zeros holds the non-negative roots in increasing order
  for (auto it2 = zeros.rbegin(); it2 != zeros.rend(); ++it2) {
    if (*it2 != 0.0) add(-*it2);
  }
  for (double x : zeros) add(x);
  return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace

QuadratureRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw DomainError("Gauss-Legendre order must be positive");
  const QuadratureRule& ref = reference_rule(order);
  QuadratureRule out;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    out.nodes.push_back(mid + half * ref.nodes[i]);
    out.weights.push_back(half * ref.weights[i]);
  }
  return out;
}

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order) {
  QuadratureRule out;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const QuadratureRule r = gauss_legendre(order, a + p * width, a + (p + 1) * width);
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  }
  return out;
}

QuadratureRule radial_rule(int n, double rmax, int panels, int order) {
  QuadratureRule r = composite_gauss_legendre(0.0, rmax, panels, order);
  const double area = sphere_area(2 * n);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.weights[i] *= area * std::pow(r.nodes[i], 2 * n - 1);
  }
  return r;
}

}  // namespace htype
