#include "splitknock/diagnostics.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace splitknock {

namespace {

// Cholesky of the precision gives both the log-det and the quadratic form:
// log N(x; 0, Theta^-1) = -p/2 log(2 pi) + sum log L_ii - 1/2 |L^T x|^2.
struct GaussianLogDensity {
  Eigen::LLT<Matrix> llt;
  double log_norm = 0.0;  // constant part including the log-det

  explicit GaussianLogDensity(const Matrix& theta) : llt(theta) {
    if (llt.info() != Eigen::Success)
      throw SingularPrecision("precision matrix is not positive definite");
    const double p = static_cast<double>(theta.rows());
    log_norm = -0.5 * p * std::log(2.0 * M_PI);
    for (Index i = 0; i < theta.rows(); ++i)
      log_norm += std::log(llt.matrixL()(i, i));
  }

  double operator()(const Vector& x) const {
    return log_norm - 0.5 * (llt.matrixU() * x).squaredNorm();
  }
};

}  // namespace

Vector kl_hat(const LiftedDesign& lifted, const TransformMatrix& d,
              const Matrix& theta_star, const Matrix& theta_hat) {
  const Index p = lifted.p();
  const Index m = lifted.m();
  if (d.rows() != m || d.cols() != p)
    throw DimensionMismatch("transform does not match lifted design");
  if (theta_star.rows() != p || theta_star.cols() != p ||
      theta_hat.rows() != p || theta_hat.cols() != p)
    throw DimensionMismatch("precision matrices must be p x p");

  const GaussianLogDensity l_star(theta_star);
  const GaussianLogDensity l_hat(theta_hat);

  Vector out = Vector::Zero(m);
  for (Index i = 0; i < lifted.n(); ++i) {
    const Vector a = lifted.a.row(i).transpose();
    const Vector at = lifted.a_tilde.row(i).transpose();
    const Vector x = lifted.x_tilde.row(i).transpose() + d.d.transpose() * a;
    const double base = l_star(x) - l_hat(x);
    for (Index j = 0; j < m; ++j) {
      if (a[j] == at[j]) {
        // x^(j) = x; the bracket vanishes exactly.
        continue;
      }
      const Vector xj = x + (at[j] - a[j]) * d.d.row(j).transpose();
      out[j] += base + l_hat(xj) - l_star(xj);
    }
  }
  return out;
}

double delta_theta(double alpha, double d_row_norm, double delta_norm, Index p,
                   double lambda_x) {
  return 4.0 * alpha * d_row_norm * delta_norm *
         (std::sqrt(2.0 * static_cast<double>(p) * lambda_x) +
          2.0 * alpha * d_row_norm * d_row_norm);
}

double kl_bound(double delta, Index n, Index m) {
  if (n < 1 || m < 2) throw EmptyInput("kl_bound needs n >= 1 and m >= 2");
  return 2.0 * delta *
         std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(m)));
}

Matrix estimate_precision(const Matrix& x_unlabeled, double ridge) {
  const Index n = x_unlabeled.rows();
  const Index p = x_unlabeled.cols();
  if (n < 1 || p < 1) throw EmptyInput("empty sample for precision estimation");
  Matrix s = x_unlabeled.transpose() * x_unlabeled / static_cast<double>(n);
  if (ridge < 0.0) ridge = 1e-8 * s.trace() / static_cast<double>(p);
  s.diagonal().array() += ridge;
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success)
    throw SingularAfterRidge("ridged sample covariance is not invertible");
  return llt.solve(Matrix::Identity(p, p));
}

}  // namespace splitknock
