#pragma once

#include "splitknock/types.hpp"

namespace splitknock {

// Inputs to the estimation-robustness bound: true precision Theta = Sigma_X^-1,
// the plug-in estimate, and the top eigenvalue of Sigma_X.
struct PrecisionPair {
  Matrix theta_star;
  Matrix theta_hat;
  double lambda_x = 0.0;
};

// Per-coordinate sample KL divergence. For each row, x = x_tilde + a D and
// x^(j) is the same point with a_j replaced by a_tilde_j; the summand is
//   l*(x) - l_hat(x) + l_hat(x^(j)) - l*(x^(j))
// with l*, l_hat zero-mean Gaussian log-densities (full log-dets included on
// both sides, so they cancel pairwise).
Vector kl_hat(const LiftedDesign& lifted, const TransformMatrix& d,
              const Matrix& theta_star, const Matrix& theta_hat);

// 4 alpha |D_j| |Delta| (sqrt(2 p Lambda_X) + 2 alpha |D_j|^2), the
// per-coordinate deviation scale driven by Delta = Theta - Theta_hat.
double delta_theta(double alpha, double d_row_norm, double delta_norm, Index p,
                   double lambda_x);

// Leading term 2 delta sqrt(n log m) of the high-probability KL envelope.
double kl_bound(double delta, Index n, Index m);

// Inverts S_N = X^T X / N + ridge I. Default ridge: 1e-8 * trace(S_N) / p.
Matrix estimate_precision(const Matrix& x_unlabeled, double ridge = -1.0);

}  // namespace splitknock
