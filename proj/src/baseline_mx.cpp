#include "splitknock/baseline_mx.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

#include "splitknock/gaussian.hpp"

namespace splitknock {

MXParams MXParams::equi(const Matrix& sigma_x, double safety) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sigma_x + sigma_x.transpose()));
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin < -1e-10) throw NotPSD("sigma_x has a negative eigenvalue");
  MXParams params;
  params.sigma_x = 0.5 * (sigma_x + sigma_x.transpose());
  params.s = Vector::Constant(sigma_x.rows(),
                              std::min(2.0 * std::max(lmin, 0.0), 1.0) * safety);
  return params;
}

Matrix mx_knockoff_copies(const Matrix& x, const MXParams& params, Rng& rng) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (params.sigma_x.rows() != p || params.s.size() != p)
    throw DimensionMismatch("params do not match design columns");
  if (params.s.cwiseAbs().maxCoeff() == 0.0) return x;  // zero-gap copy

  const Matrix sig_inv = psd_pinverse(params.sigma_x);
  const Matrix shift = params.sigma_x - Matrix(params.s.asDiagonal());
  // mean rows: x_i Sigma^-1 (Sigma - S); cov: Sigma - (Sigma-S) Sigma^-1 (Sigma-S)
  const Matrix mean = x * sig_inv * shift;
  Matrix cov = params.sigma_x - shift * sig_inv * shift;
  const Matrix f = psd_factor(cov);

  Matrix z(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) z(i, j) = rng.normal();
  return mean + z * f.transpose();
}

namespace {

LiftedDesign lasso_design(const Matrix& x, const Matrix& x_tilde, const Vector& y) {
  if (x.rows() != x_tilde.rows() || x.cols() != x_tilde.cols() ||
      y.size() != x.rows())
    throw DimensionMismatch("X, X~ and y shapes are inconsistent");
  LiftedDesign d;
  d.x_tilde = Matrix::Zero(x.rows(), 0);
  d.a = x;
  d.a_tilde = x_tilde;
  d.y = y;
  return d;
}

LiftedDesign lasso_rows(const LiftedDesign& design, const std::vector<int>& rows) {
  LiftedDesign out;
  out.x_tilde = Matrix::Zero(static_cast<Index>(rows.size()), 0);
  out.a.resize(static_cast<Index>(rows.size()), design.m());
  out.a_tilde.resize(static_cast<Index>(rows.size()), design.m());
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.a.row(static_cast<Index>(i)) = design.a.row(rows[i]);
    out.a_tilde.row(static_cast<Index>(i)) = design.a_tilde.row(rows[i]);
    out.y[static_cast<Index>(i)] = design.y[rows[i]];
  }
  return out;
}

}  // namespace

WVector mx_lcd_statistic_fixed(const Matrix& x, const Matrix& x_tilde,
                               const Vector& y, Loss loss, double lambda,
                               const SolverSettings& settings) {
  const LiftedDesign design = lasso_design(x, x_tilde, y);
  const TransformMatrix dummy = TransformMatrix::identity(x.cols());
  const SplitSolution sol =
      detail::fit_core(design, loss, dummy, 0.0, lambda, nullptr, settings);
  return w_statistics(sol);
}

WVector mx_lcd_statistic(const Matrix& x, const Matrix& x_tilde, const Vector& y,
                         Loss loss, const std::vector<double>& lambda_grid,
                         int folds, std::uint64_t seed,
                         const SolverSettings& settings) {
  if (lambda_grid.empty()) throw EmptyGrid("empty lambda grid");
  const LiftedDesign design = lasso_design(x, x_tilde, y);
  const TransformMatrix dummy = TransformMatrix::identity(x.cols());

  std::vector<double> lambdas = lambda_grid;
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());

  double lambda_hat = lambdas.front();
  if (lambdas.size() > 1 && folds >= 2) {
    const Index n = design.n();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    std::vector<std::vector<int>> fold_rows(static_cast<std::size_t>(folds));
    for (Index i = 0; i < n; ++i)
      fold_rows[static_cast<std::size_t>(i) % folds].push_back(perm[i]);

    std::vector<double> cv(lambdas.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
      std::vector<int> train_rows;
      for (int g = 0; g < folds; ++g)
        if (g != f)
          train_rows.insert(train_rows.end(), fold_rows[g].begin(),
                            fold_rows[g].end());
      const LiftedDesign train = lasso_rows(design, train_rows);
      const LiftedDesign test = lasso_rows(design, fold_rows[f]);
      const SplitSolution* warm = nullptr;
      std::vector<SplitSolution> path;
      path.reserve(lambdas.size());
      for (std::size_t li = 0; li < lambdas.size(); ++li) {
        path.push_back(
            detail::fit_core(train, loss, dummy, 0.0, lambdas[li], warm, settings));
        warm = &path.back();
        cv[li] += prediction_loss(test, loss, path[li].beta, path[li].gamma,
                                  path[li].gamma_tilde);
      }
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      if (cv[li] < best) {  // descending scan: ties keep the larger lambda
        best = cv[li];
        lambda_hat = lambdas[li];
      }
    }
  }
  return mx_lcd_statistic_fixed(x, x_tilde, y, loss, lambda_hat, settings);
}

}  // namespace splitknock
