#pragma once

#include <optional>

#include "splitknock/rng.hpp"
#include "splitknock/types.hpp"

namespace splitknock {

enum class SMode { Independent, MaxEqui, Custom };
enum class PrecisionSource { Known, EstimatedSampleCov };

// alpha-parameterized construction: Sigma_A = alpha I, Sigma_AX = alpha D.
struct GaussianSplitParams {
  Matrix sigma_x;   // p x p
  double alpha = 0.0;
  TransformMatrix d;
  Vector s;         // length m, 0 <= s_j <= 2 alpha
  PrecisionSource precision_source = PrecisionSource::Known;

  Index p() const { return sigma_x.rows(); }
  Index m() const { return d.rows(); }
};

// Fully general construction with free Sigma_A and Sigma_AX blocks.
struct GeneralSplitParams {
  Matrix sigma_x;        // p x p
  Matrix sigma_a;        // m x m
  Matrix sigma_ax;       // m x p
  Vector s;              // length m
  TransformMatrix d;
  Matrix sigma_xtilde;   // p x p, derived
  Matrix sigma_a_tilde;  // m x m, derived conditional covariance

  Index p() const { return sigma_x.rows(); }
  Index m() const { return sigma_a.rows(); }

  static GeneralSplitParams build(Matrix sigma_x, Matrix sigma_a,
                                  Matrix sigma_ax, Vector s, TransformMatrix d);
  // Block covariance of (x_tilde, a, a_tilde); used by the PSD invariant check.
  Matrix joint_covariance() const;
};

// Supremum alpha keeping the conditional covariance alpha(I - alpha D
// sigma_x^-1 D^T) PSD, i.e. 1 / lambda_max(D sigma_x^-1 D^T), scaled by a 0.99
// safety factor.
double max_feasible_alpha(const Matrix& sigma_x, const TransformMatrix& d);

GaussianSplitParams build_params(const Matrix& sigma_x, const TransformMatrix& d,
                                 std::optional<double> alpha, SMode s_mode,
                                 const std::optional<Vector>& custom_s = std::nullopt);

// Draws A | X, then a_tilde, for externally observed design rows.
LiftedDesign lift_observed(const GaussianSplitParams& params, const Matrix& x, Rng& rng);

// Draws n i.i.d. rows of (x_tilde, a, a_tilde) with X ~ N(0, sigma_x).
LiftedDesign sample_lifted(const GaussianSplitParams& params, Index n, Rng& rng);

LiftedDesign sample_lifted_general(const GeneralSplitParams& params, Index n, Rng& rng);

// Internal sampling helper shared with baseline_mx: a factor F with F F^T = cov
// (Cholesky, or eigendecomposition with clamped small negatives for
// rank-deficient blocks). Throws CholeskyFailure / NotPSD.
Matrix psd_factor(const Matrix& cov);

// Pseudo-inverse of a symmetric PSD matrix via eigendecomposition.
Matrix psd_pinverse(const Matrix& cov);

}  // namespace splitknock
