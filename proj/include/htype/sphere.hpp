#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace htype {

/// Quadrature on S^{m-1} for the surface measure.
///   m = 1: the two points {+1, -1}, unit weights.
///   m = 2: `resolution`-point trapezoid rule on the circle.
///   m = 3: Gauss-Legendre(resolution) in cos(theta) x trapezoid(2 resolution).
///   m >= 4: `resolution` randomized Halton points pushed through the inverse
///           normal map and normalized; equal weights. Needs a seed.
struct SphereRule {
  int m = 0;
  int resolution = 0;
  std::uint64_t seed = 0;
  std::vector<double> nodes;  // size() * m, row-major
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * m, static_cast<std::size_t>(m)};
  }
  std::string kind() const;
};

SphereRule sphere_rule(int m, int resolution, std::uint64_t seed = 0);

/// Same rule family at twice the resolution.
SphereRule refine(const SphereRule& rule);

/// True when the rule depends on the seed.
bool sphere_rule_is_random(int m);

}  // namespace htype
