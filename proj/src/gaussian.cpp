#include "splitknock/gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace splitknock {

namespace {

constexpr double kPsdRelTol = 1e-10;

double psd_scale(const Matrix& cov) {
  const double t = cov.diagonal().cwiseAbs().maxCoeff();
  return t > 0 ? t : 1.0;
}

Matrix standard_normal(Index n, Index d, Rng& rng) {
  Matrix z(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) z(i, j) = rng.normal();
  return z;
}

}  // namespace

Matrix psd_factor(const Matrix& cov) {
  Matrix sym = 0.5 * (cov + cov.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success)
    throw CholeskyFailure("eigendecomposition fallback failed");
  const double scale = psd_scale(sym);
  Vector vals = eig.eigenvalues();
  for (Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < -1e-8 * scale)
      throw CholeskyFailure("covariance block has a negative eigenvalue");
    vals[i] = std::max(vals[i], 0.0);
  }
  return eig.eigenvectors() * vals.cwiseSqrt().asDiagonal();
}

Matrix psd_pinverse(const Matrix& cov) {
  Matrix sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success)
    throw CholeskyFailure("eigendecomposition failed");
  const double tol = kPsdRelTol * psd_scale(sym) * static_cast<double>(sym.rows());
  Vector inv = eig.eigenvalues();
  for (Index i = 0; i < inv.size(); ++i)
    inv[i] = inv[i] > tol ? 1.0 / inv[i] : 0.0;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

double max_feasible_alpha(const Matrix& sigma_x, const TransformMatrix& d) {
  if (sigma_x.rows() != sigma_x.cols() || sigma_x.rows() != d.cols())
    throw DimensionMismatch("sigma_x must be p x p matching the transform");
  const Matrix gram = d.d.transpose() * d.d;
  if (gram.cwiseAbs().maxCoeff() == 0.0)
    throw ZeroTransform("D^T D is the zero matrix");

  const Matrix sym = 0.5 * (sigma_x + sigma_x.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success)
    throw NotPSD("sigma_x must be positive definite");

  // sigma_x - alpha D^T D >= 0  iff  alpha <= 1 / lmax(D sigma_x^-1 D^T);
  // the same bound keeps the conditional covariance of A | X nonnegative.
  const Matrix dsd = d.d * llt.solve(d.d.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (dsd + dsd.transpose()));
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmax > 0.0)) throw ZeroTransform("D maps into the null space of sigma_x");
  return 0.99 / lmax;
}

GaussianSplitParams build_params(const Matrix& sigma_x, const TransformMatrix& d,
                                 std::optional<double> alpha, SMode s_mode,
                                 const std::optional<Vector>& custom_s) {
  GaussianSplitParams params;
  params.sigma_x = 0.5 * (sigma_x + sigma_x.transpose());
  params.d = d;
  if (alpha) {
    params.alpha = *alpha;
    const Matrix gap = params.sigma_x - params.alpha * d.d.transpose() * d.d;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gap);
    const double tol = kPsdRelTol * std::max(1.0, psd_scale(params.sigma_x));
    if (params.alpha <= 0.0 || eig.eigenvalues().minCoeff() < -tol)
      throw InfeasibleAlpha("sigma_x - alpha D^T D is not PSD");
  } else {
    params.alpha = max_feasible_alpha(sigma_x, d);
  }

  const Index m = d.rows();
  switch (s_mode) {
    case SMode::Independent:
      params.s = Vector::Constant(m, params.alpha);
      break;
    case SMode::MaxEqui:
      params.s = Vector::Constant(m, 2.0 * params.alpha * 0.95);
      break;
    case SMode::Custom:
      if (!custom_s || custom_s->size() != m)
        throw InvalidS("custom s vector missing or of wrong length");
      params.s = *custom_s;
      for (Index j = 0; j < m; ++j)
        if (params.s[j] < 0.0 || params.s[j] > 2.0 * params.alpha)
          throw InvalidS("s entries must lie in [0, 2 alpha]");
      break;
  }
  return params;
}

LiftedDesign lift_observed(const GaussianSplitParams& params, const Matrix& x,
                           Rng& rng) {
  const Index n = x.rows();
  const Index p = params.p();
  const Index m = params.m();
  if (x.cols() != p) throw DimensionMismatch("design columns do not match sigma_x");

  // A | X = x is N(alpha D Sigma^-1 x, alpha I - alpha^2 D Sigma^-1 D^T).
  const Matrix sig_inv_dt = psd_pinverse(params.sigma_x) * params.d.d.transpose();
  const Matrix k = params.alpha * sig_inv_dt.transpose();  // m x p
  Matrix cov_a = params.alpha * Matrix::Identity(m, m) -
                 params.alpha * k * params.d.d.transpose();
  const Matrix fa = psd_factor(cov_a);

  LiftedDesign out;
  out.a = x * k.transpose() + standard_normal(n, m, rng) * fa.transpose();
  out.x_tilde = x - out.a * params.d.d;

  // a_tilde | a from the marginal (A, A~) joint with blocks alpha I and
  // alpha I - diag(s).
  Vector shrink(m), cond_sd(m);
  for (Index j = 0; j < m; ++j) {
    shrink[j] = 1.0 - params.s[j] / params.alpha;
    const double v = 2.0 * params.s[j] - params.s[j] * params.s[j] / params.alpha;
    cond_sd[j] = std::sqrt(std::max(v, 0.0));
  }
  out.a_tilde = out.a * shrink.asDiagonal();
  const Matrix z = standard_normal(n, m, rng);
  for (Index j = 0; j < m; ++j)
    out.a_tilde.col(j) += cond_sd[j] * z.col(j);
  return out;
}

LiftedDesign sample_lifted(const GaussianSplitParams& params, Index n, Rng& rng) {
  const Matrix lx = psd_factor(params.sigma_x);
  const Matrix x = standard_normal(n, params.p(), rng) * lx.transpose();
  return lift_observed(params, x, rng);
}

GeneralSplitParams GeneralSplitParams::build(Matrix sigma_x, Matrix sigma_a,
                                             Matrix sigma_ax, Vector s,
                                             TransformMatrix d) {
  GeneralSplitParams gp;
  gp.sigma_x = 0.5 * (sigma_x + sigma_x.transpose());
  gp.sigma_a = 0.5 * (sigma_a + sigma_a.transpose());
  gp.sigma_ax = std::move(sigma_ax);
  gp.s = std::move(s);
  gp.d = std::move(d);
  const Index p = gp.sigma_x.rows();
  const Index m = gp.sigma_a.rows();
  if (gp.sigma_ax.rows() != m || gp.sigma_ax.cols() != p || gp.s.size() != m ||
      gp.d.rows() != m || gp.d.cols() != p)
    throw DimensionMismatch("inconsistent general split parameter blocks");

  const Matrix at_d = gp.sigma_ax.transpose() * gp.d.d;  // p x p
  gp.sigma_xtilde = gp.sigma_x - at_d - at_d.transpose() +
                    gp.d.d.transpose() * gp.sigma_a * gp.d.d;
  const Matrix c = gp.sigma_ax - gp.sigma_a * gp.d.d;
  gp.sigma_a_tilde =
      gp.sigma_a - c * psd_pinverse(gp.sigma_xtilde) * c.transpose();
  gp.sigma_a_tilde = 0.5 * (gp.sigma_a_tilde + gp.sigma_a_tilde.transpose());
  return gp;
}

Matrix GeneralSplitParams::joint_covariance() const {
  const Index np = p();
  const Index nm = m();
  const Matrix c = sigma_ax - sigma_a * d.d;
  Matrix joint(np + 2 * nm, np + 2 * nm);
  const Matrix cross_at = sigma_a - Matrix(s.asDiagonal());
  joint.topLeftCorner(np, np) = sigma_xtilde;
  joint.block(0, np, np, nm) = c.transpose();
  joint.block(0, np + nm, np, nm) = c.transpose();
  joint.block(np, 0, nm, np) = c;
  joint.block(np + nm, 0, nm, np) = c;
  joint.block(np, np, nm, nm) = sigma_a;
  joint.block(np, np + nm, nm, nm) = cross_at;
  joint.block(np + nm, np, nm, nm) = cross_at;
  joint.block(np + nm, np + nm, nm, nm) = sigma_a;
  return joint;
}

LiftedDesign sample_lifted_general(const GeneralSplitParams& gp, Index n,
                                   Rng& rng) {
  const Index p = gp.p();
  const Index m = gp.m();
  const TransformMatrix& d = gp.d;
  const Matrix c = gp.sigma_ax - gp.sigma_a * d.d;
  const Matrix xtilde_pinv = psd_pinverse(gp.sigma_xtilde);

  // Joint (X, A) draw, then x_tilde = x - a D.
  Matrix joint_xa(p + m, p + m);
  joint_xa.topLeftCorner(p, p) = gp.sigma_x;
  joint_xa.topRightCorner(p, m) = gp.sigma_ax.transpose();
  joint_xa.bottomLeftCorner(m, p) = gp.sigma_ax;
  joint_xa.bottomRightCorner(m, m) = gp.sigma_a;
  const Matrix f = psd_factor(joint_xa);
  const Matrix xa = standard_normal(n, p + m, rng) * f.transpose();

  LiftedDesign out;
  const Matrix x = xa.leftCols(p);
  out.a = xa.rightCols(m);
  out.x_tilde = x - out.a * d.d;

  if (gp.s.cwiseAbs().maxCoeff() == 0.0) {
    out.a_tilde = out.a;  // zero-gap knockoff is a copy
    return out;
  }

  // a_tilde | (a, x_tilde): Gaussian conditional inside the (A, A~) | x_tilde
  // joint with covariance blocks sigma_a_tilde and sigma_a_tilde - diag(s).
  const Matrix cross = gp.sigma_a_tilde - Matrix(gp.s.asDiagonal());
  const Matrix at_pinv = psd_pinverse(gp.sigma_a_tilde);
  const Matrix j = cross * at_pinv;
  Matrix cond_cov = gp.sigma_a_tilde - j * cross.transpose();
  const Matrix fc = psd_factor(cond_cov);

  const Matrix mu = out.x_tilde * (c * xtilde_pinv).transpose();  // n x m
  out.a_tilde = mu + (out.a - mu) * j.transpose() +
                standard_normal(n, m, rng) * fc.transpose();
  return out;
}

}  // namespace splitknock
