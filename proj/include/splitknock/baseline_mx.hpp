#pragma once

#include "splitknock/rng.hpp"
#include "splitknock/solver.hpp"
#include "splitknock/types.hpp"

namespace splitknock {

// Vanilla Gaussian Model-X knockoffs for D = I comparison runs.
struct MXParams {
  Matrix sigma_x;  // p x p
  Vector s;        // length p

  // Equi-correlated rule s_j = min(2 lambda_min(sigma), 1) * safety.
  static MXParams equi(const Matrix& sigma_x, double safety = 0.95);
};

// Draws X~ | X from the conditional Gaussian of the knockoff joint
// [[Sigma, Sigma - diag(s)], [Sigma - diag(s), Sigma]].
Matrix mx_knockoff_copies(const Matrix& x, const MXParams& params, Rng& rng);

// Lasso-coefficient-difference statistic on [X, X~] at a cross-validated
// lambda: W_j = |b_j| - |b_{j+p}|.
WVector mx_lcd_statistic(const Matrix& x, const Matrix& x_tilde, const Vector& y,
                         Loss loss, const std::vector<double>& lambda_grid,
                         int folds, std::uint64_t seed,
                         const SolverSettings& settings = {});

// Same statistic at a fixed lambda (no cross validation).
WVector mx_lcd_statistic_fixed(const Matrix& x, const Matrix& x_tilde,
                               const Vector& y, Loss loss, double lambda,
                               const SolverSettings& settings = {});

}  // namespace splitknock
