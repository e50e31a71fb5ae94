#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "htype/group_function.hpp"
#include "htype/profile.hpp"

namespace htype {

/// Output of an operator on group functions: grid values for grid inputs,
/// (|z|, t) samples for spectral inputs.
struct GroupValues {
  bool on_grid = false;
  GridField grid;
  GroupSamples samples;

  double norm() const;
  void axpy(Complex a, const GroupValues& x);
  GroupValues zeros_like() const;
};

double relative_error(const GroupValues& f, const GroupValues& reference);

/// Where spectral-backend outputs are sampled. Ignored for grid inputs,
/// whose outputs share the input grid.
struct SampleLayout {
  std::vector<double> radii;
  std::vector<double> t_points;  // row-major, m per point
};

struct RestrictionOptions {
  int max_k = 500;
  /// Stop once `patience` consecutive terms fall below k_tolerance times the
  /// accumulated norm.
  double k_tolerance = 1e-12;
  int patience = 3;
  int sphere_resolution = 16;
  /// Point count of the randomized rule used when m >= 4.
  int qmc_points = 4096;
  std::uint64_t seed = 1;
  /// Relative node-doubling residual allowed before QuadratureError.
  double sphere_tolerance = 1e-6;
  ConvolutionOptions convolution;
};

struct ProjectionResult {
  GroupValues values;
  int k_used = 0;
  std::size_t sphere_nodes = 0;
  /// Estimated norm of the omitted k terms, relative to the output norm.
  double k_tail_estimate = 0.0;
  /// Norm of the change under sphere-node doubling, relative to the output.
  double sphere_residual = 0.0;
  std::vector<double> term_norms;
};

/// Laguerre coefficient <p, phi_k^lambda> / ||phi_k^lambda||^2 of the radial
/// profile p on R^{2n}, which is negligible beyond `radius`.
double laguerre_coefficient(const std::function<double(double)>& profile, int n, double lambda,
                            int k, double radius);

/// P_mu f = (2 pi)^{-(n+m)} sum_k lambda_k^{n+m-1} |lambda_k'|
///          int_{S^{m-1}} f * e_k^{lambda_k w} dsigma(w).
ProjectionResult restriction_apply(const HTypeGroup& group, const SpectralProfile& profile,
                                   const GroupFunction& f, double mu,
                                   const SampleLayout& layout = {},
                                   const RestrictionOptions& opts = {});

struct CalculusOptions {
  /// mu-range; NaN selects it from a coarse scan of ||P_mu f||.
  double mu_lo = std::numeric_limits<double>::quiet_NaN();
  double mu_hi = std::numeric_limits<double>::quiet_NaN();
  int intervals = 128;  // composite Simpson in log mu, even
  int scan_points = 41;
  /// The scan keeps mu where ||P_mu f|| exceeds this fraction of its peak.
  double support_tolerance = 1e-10;
  RestrictionOptions restriction;
};

/// P_mu f on the Simpson nodes of the mu-grid, reusable across symbols.
struct CalculusTable {
  std::vector<double> mu;
  std::vector<double> weights;
  std::vector<ProjectionResult> projections;
  double mu_lo = 0.0;
  double mu_hi = 0.0;
};

CalculusTable restriction_table(const HTypeGroup& group, const SpectralProfile& profile,
                                const GroupFunction& f, const SampleLayout& layout = {},
                                const CalculusOptions& opts = {});

/// int H(mu) P_mu f dmu over the table's quadrature.
GroupValues integrate_symbol(const CalculusTable& table, const std::function<double(double)>& H);

/// H(h(L, T)) f; H = 1 inverts the spectral decomposition.
GroupValues calculus_apply(const HTypeGroup& group, const SpectralProfile& profile,
                           const std::function<double(double)>& H, const GroupFunction& f,
                           const SampleLayout& layout = {}, const CalculusOptions& opts = {});

/// The input itself on the output layout (grid values, or direct polar
/// quadrature for spectral inputs).
GroupValues sample_input(const GroupFunction& f, const SampleLayout& layout);

}  // namespace htype
