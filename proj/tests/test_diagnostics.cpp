#include <cmath>

#include "doctest.h"
#include "splitknock/diagnostics.hpp"
#include "splitknock/gaussian.hpp"

using namespace splitknock;

namespace {

LiftedDesign tiny_lifted() {
  LiftedDesign lifted;
  lifted.x_tilde = Matrix::Zero(1, 1);
  lifted.a = Matrix::Constant(1, 1, 2.0);
  lifted.a_tilde = Matrix::Constant(1, 1, 1.0);
  return lifted;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("scalar KL hand value") {
    // n=1, p=1, D=(1), x=2, substituted point 1, Theta=1, Theta_hat=4:
    // [-2 + 8] + [-2 + 0.5] = 4.5 (log-dets cancel within the bracket).
    const TransformMatrix d = TransformMatrix::identity(1);
    const Matrix theta_star = Matrix::Constant(1, 1, 1.0);
    const Matrix theta_hat = Matrix::Constant(1, 1, 4.0);
    const Vector kl = kl_hat(tiny_lifted(), d, theta_star, theta_hat);
    REQUIRE(kl.size() == 1);
    CHECK(kl[0] == doctest::Approx(4.5).epsilon(1e-12));
  }

  TEST_CASE("exact precision gives exactly zero divergence") {
    Rng rng(5);
    Matrix sigma(3, 3);
    sigma << 1.0, 0.3, 0.1, 0.3, 1.0, 0.3, 0.1, 0.3, 1.0;
    const TransformMatrix d = TransformMatrix::identity(3);
    const GaussianSplitParams params =
        build_params(sigma, d, std::nullopt, SMode::Independent);
    const LiftedDesign lifted = sample_lifted(params, 50, rng);
    const Matrix theta = sigma.inverse();
    const Vector kl = kl_hat(lifted, d, theta, theta);
    CHECK(kl.cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("identical knockoff rows give zero divergence") {
    LiftedDesign lifted;
    lifted.x_tilde = Matrix::Random(6, 2);
    lifted.a = Matrix::Random(6, 2);
    lifted.a_tilde = lifted.a;
    const TransformMatrix d = TransformMatrix::identity(2);
    Matrix theta_star = Matrix::Identity(2, 2);
    Matrix theta_hat(2, 2);
    theta_hat << 2.0, 0.5, 0.5, 2.0;
    const Vector kl = kl_hat(lifted, d, theta_star, theta_hat);
    CHECK(kl.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("swapping the two precisions negates every coordinate") {
    Rng rng(7);
    Matrix sigma(2, 2);
    sigma << 1.0, 0.5, 0.5, 1.0;
    const TransformMatrix d = TransformMatrix::identity(2);
    const GaussianSplitParams params =
        build_params(sigma, d, std::nullopt, SMode::Independent);
    const LiftedDesign lifted = sample_lifted(params, 30, rng);
    const Matrix theta_star = sigma.inverse();
    Matrix theta_hat(2, 2);
    theta_hat << 1.5, -0.2, -0.2, 1.5;
    const Vector fwd = kl_hat(lifted, d, theta_star, theta_hat);
    const Vector rev = kl_hat(lifted, d, theta_hat, theta_star);
    CHECK((fwd + rev).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("deviation scale hand values") {
    CHECK(delta_theta(1.0, 2.0, 0.0, 5, 1.0) == 0.0);
    const double v = delta_theta(1.0, std::sqrt(2.0), 0.1, 2, 1.0);
    CHECK(v == doctest::Approx(2.4 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(delta_theta(1.0, std::sqrt(2.0), 0.2, 2, 1.0) ==
          doctest::Approx(2.0 * v).epsilon(1e-12));
  }

  TEST_CASE("KL envelope hand values and monotonicity") {
    CHECK(kl_bound(0.0, 10, 5) == 0.0);
    CHECK(kl_bound(1.0, 100, static_cast<Index>(std::exp(1.0)) + 1) >
          kl_bound(1.0, 100, 2));
    // delta=1, n=100, log m = 1 -> 20 (probe with m chosen so log m = 1).
    const double v = 2.0 * std::sqrt(100.0 * std::log(3.0));
    CHECK(kl_bound(1.0, 100, 3) == doctest::Approx(v));
    CHECK(kl_bound(1.0, 400, 3) > kl_bound(1.0, 100, 3));
    CHECK_THROWS_AS(kl_bound(1.0, 0, 3), EmptyInput);
    CHECK_THROWS_AS(kl_bound(1.0, 10, 1), EmptyInput);
  }

  TEST_CASE("precision estimate converges to the truth") {
    Rng rng(11);
    const Index n = 100000, p = 2;
    Matrix x(n, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j) x(i, j) = rng.normal();
    const Matrix theta = estimate_precision(x);
    const double tol =
        4.0 * std::sqrt(p * std::log(static_cast<double>(p)) / n) + 0.02;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(theta - Matrix::Identity(p, p));
    CHECK(eig.eigenvalues().cwiseAbs().maxCoeff() <= tol);
  }

  TEST_CASE("rank deficiency without ridge is an error") {
    Matrix x = Matrix::Zero(1, 3);
    x(0, 0) = 1.0;
    CHECK_THROWS_AS(estimate_precision(x, 0.0), SingularAfterRidge);
  }

  TEST_CASE("huge ridge drives the estimate to zero") {
    Rng rng(13);
    Matrix x(50, 2);
    for (Index i = 0; i < 50; ++i)
      for (Index j = 0; j < 2; ++j) x(i, j) = rng.normal();
    const Matrix theta = estimate_precision(x, 1e12);
    CHECK(theta.cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("empirical envelope holds with small estimation error") {
    // Draw designs, perturb the precision slightly, and check the observed
    // max KL against twice the leading-order bound.
    const Index p = 10, n = 500;
    Matrix sigma = Matrix::Identity(p, p);
    for (Index i = 0; i + 1 < p; ++i) sigma(i, i + 1) = sigma(i + 1, i) = 0.2;
    const TransformMatrix d = [] {
      Matrix m = Matrix::Zero(9, 10);
      for (Index i = 0; i < 9; ++i) {
        m(i, i) = 1.0;
        m(i, i + 1) = -1.0;
      }
      return TransformMatrix::graph_difference(m);
    }();
    const GaussianSplitParams params =
        build_params(sigma, d, std::nullopt, SMode::Independent);
    const Matrix theta_star = sigma.inverse();

    int ok = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
      Rng rng(1000 + t);
      const LiftedDesign lifted = sample_lifted(params, n, rng);
      Matrix noise(p, p);
      for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) noise(i, j) = rng.normal();
      const Matrix delta = 1e-3 * 0.5 * (noise + noise.transpose());
      const Matrix theta_hat = theta_star - delta;
      const Vector kl = kl_hat(lifted, d, theta_star, theta_hat);

      Eigen::SelfAdjointEigenSolver<Matrix> se(sigma);
      const double lambda_x = se.eigenvalues().maxCoeff();
      Eigen::SelfAdjointEigenSolver<Matrix> de(delta);
      const double delta_norm = de.eigenvalues().cwiseAbs().maxCoeff();
      double max_bound = 0.0;
      for (Index j = 0; j < d.rows(); ++j) {
        const double dd = delta_theta(params.alpha, d.d.row(j).norm(),
                                      delta_norm, p, lambda_x);
        max_bound = std::max(max_bound, kl_bound(dd, n, d.rows()));
      }
      if (kl.maxCoeff() <= 2.0 * max_bound) ++ok;
    }
    CHECK(ok >= 90);
  }
}
