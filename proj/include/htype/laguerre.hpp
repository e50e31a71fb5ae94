#pragma once

#include <span>

namespace htype {

/// Generalized Laguerre polynomial L_k^a(x) by the three-term recurrence in k.
double laguerre_poly(int k, double a, double x);

/// Fills out[j] = L_j^a(x) for j = 0..out.size()-1.
void laguerre_sequence(double a, double x, std::span<double> out);

/// phi_k^lambda at a point with |z|^2 = r2:
/// L_k^{n-1}(lambda r2 / 2) exp(-lambda r2 / 4).
double laguerre_function(int k, int n, double lambda, double r2);

/// phi_k^lambda(z) for z in R^{2n}.
double phi(int k, int n, double lambda, std::span<const double> z);

/// out[j] = phi_j^lambda at |z|^2 = r2, j = 0..out.size()-1.
void laguerre_function_sequence(int n, double lambda, double r2, std::span<double> out);

/// ||phi_k^lambda||_2^2 on R^{2n} = (2 pi / lambda)^n binom(k + n - 1, k).
double laguerre_function_norm2(int k, int n, double lambda);

}  // namespace htype
