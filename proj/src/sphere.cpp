#include "htype/sphere.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <random>

#include "htype/common.hpp"
#include "htype/quadrature.hpp"

namespace htype {

std::string SphereRule::kind() const {
  if (m == 1) return "two-point";
  if (m == 2) return "trapezoid";
  if (m == 3) return "gauss-legendre x trapezoid";
  return "randomized halton";
}

bool sphere_rule_is_random(int m) { return m >= 4; }

namespace {

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

std::vector<int> first_primes(int count) {
  std::vector<int> p;
  for (int c = 2; static_cast<int>(p.size()) < count; ++c) {
    bool prime = true;
    for (int q : p) {
      if (q * q > c) break;
      if (c % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) p.push_back(c);
  }
  return p;
}

}  // namespace

SphereRule sphere_rule(int m, int resolution, std::uint64_t seed) {
  if (m < 1) throw DomainError("sphere dimension m must be >= 1");
  if (resolution < 1 && m > 1) throw DomainError("sphere rule resolution must be positive");
  SphereRule r;
  r.m = m;
  r.resolution = resolution;
  r.seed = seed;
  if (m == 1) {
    r.nodes = {1.0, -1.0};
    r.weights = {1.0, 1.0};
    return r;
  }
  if (m == 2) {
    for (int j = 0; j < resolution; ++j) {
      const double th = 2.0 * kPi * j / resolution;
      r.nodes.push_back(std::cos(th));
      r.nodes.push_back(std::sin(th));
      r.weights.push_back(2.0 * kPi / resolution);
    }
    return r;
  }
  if (m == 3) {
    const QuadratureRule gl = gauss_legendre(resolution);
    const int nphi = 2 * resolution;
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double c = gl.nodes[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < nphi; ++j) {
        const double ph = 2.0 * kPi * j / nphi;
        r.nodes.push_back(s * std::cos(ph));
        r.nodes.push_back(s * std::sin(ph));
        r.nodes.push_back(c);
        r.weights.push_back(gl.weights[i] * 2.0 * kPi / nphi);
      }
    }
    return r;
  }
  const std::vector<int> primes = first_primes(m);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> shift(m);
  for (double& s : shift) s = uni(rng);
  const double w = sphere_area(m) / resolution;
  std::vector<double> x(m);
  for (int i = 0; i < resolution; ++i) {
    double norm2 = 0.0;
    for (int d = 0; d < m; ++d) {
      double u = radical_inverse(static_cast<std::uint64_t>(i) + 1, primes[d]) + shift[d];
      u -= std::floor(u);
      u = std::clamp(u, 1e-16, 1.0 - 1e-16);
      x[d] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
      norm2 += x[d] * x[d];
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (int d = 0; d < m; ++d) r.nodes.push_back(x[d] * inv);
    r.weights.push_back(w);
  }
  return r;
}

SphereRule refine(const SphereRule& rule) {
  if (rule.m == 1) return rule;
  return sphere_rule(rule.m, 2 * rule.resolution, rule.seed);
}

}  // namespace htype
