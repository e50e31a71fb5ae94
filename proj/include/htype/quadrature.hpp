#pragma once

#include <vector>

namespace htype {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// order-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

/// Composite Gauss-Legendre: `panels` equal panels of `order` points.
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order = 20);

/// Rule for radial integrals over R^{2n}: sum w_i f(r_i) approximates
/// int_{R^{2n}} f(|z|) dz on |z| <= rmax.
QuadratureRule radial_rule(int n, double rmax, int panels, int order = 20);

}  // namespace htype
