#include <cmath>

#include "doctest.h"
#include "splitknock/gaussian.hpp"

using namespace splitknock;

namespace {

Matrix ar_cov3(double c) {
  Matrix s(3, 3);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      s(i, j) = std::pow(c, std::abs(static_cast<double>(i - j)));
  return s;
}

Matrix empirical_cov(const Matrix& a, const Matrix& b) {
  const double n = static_cast<double>(a.rows());
  return a.transpose() * b / n;
}

}  // namespace

TEST_SUITE("gaussian") {
  TEST_CASE("max_feasible_alpha identity examples") {
    const TransformMatrix d = TransformMatrix::identity(2);
    CHECK(max_feasible_alpha(Matrix::Identity(2, 2), d) ==
          doctest::Approx(0.99));
    CHECK(max_feasible_alpha(2.0 * Matrix::Identity(2, 2), d) ==
          doctest::Approx(1.98));
  }

  TEST_CASE("max_feasible_alpha on AR(0.5) with the difference operator") {
    const Matrix sigma = ar_cov3(0.5);
    Matrix d2(2, 3);
    d2 << 1, -1, 0, 0, 1, -1;
    const TransformMatrix d = TransformMatrix::graph_difference(d2);
    const double alpha = max_feasible_alpha(sigma, d);

    // Oracle: the feasibility supremum is 1 / lmax(D Sigma^-1 D^T).
    const Matrix dsd = d.d * sigma.inverse() * d.d.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(dsd);
    const double star = 1.0 / eig.eigenvalues().maxCoeff();
    CHECK(alpha == doctest::Approx(0.99 * star));

    // Feasible at the returned value, infeasible just past the supremum.
    Eigen::SelfAdjointEigenSolver<Matrix> at(
        Matrix(sigma - alpha * d.d.transpose() * d.d));
    CHECK(at.eigenvalues().minCoeff() >= -1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> past(
        Matrix(sigma - 1.02 * star * d.d.transpose() * d.d));
    CHECK(past.eigenvalues().minCoeff() < 0.0);
  }

  TEST_CASE("max_feasible_alpha rejects a zero transform") {
    TransformMatrix z;
    z.d = Matrix::Zero(1, 2);
    CHECK_THROWS_AS(max_feasible_alpha(Matrix::Identity(2, 2), z),
                    ZeroTransform);
  }

  TEST_CASE("build_params s rules and validation") {
    const TransformMatrix d = TransformMatrix::identity(2);
    const Matrix sigma = Matrix::Identity(2, 2);

    const GaussianSplitParams ind =
        build_params(sigma, d, 0.5, SMode::Independent);
    CHECK(ind.s[0] == doctest::Approx(0.5));
    CHECK(ind.s[1] == doctest::Approx(0.5));

    Vector bad(2);
    bad << 1.2, 0.1;
    CHECK_THROWS_AS(build_params(sigma, d, 0.5, SMode::Custom, bad), InvalidS);
    CHECK_THROWS_AS(build_params(sigma, d, 1.5, SMode::Independent),
                    InfeasibleAlpha);
  }

  TEST_CASE("degenerate alpha makes x_tilde vanish") {
    // sigma = alpha D^T D exactly, so X~ = X - AD has zero covariance.
    const TransformMatrix d = TransformMatrix::identity(2);
    const GaussianSplitParams params =
        build_params(Matrix::Identity(2, 2), d, 1.0, SMode::Independent);
    Rng rng(3);
    const LiftedDesign lifted = sample_lifted(params, 200, rng);
    CHECK(lifted.x_tilde.cwiseAbs().maxCoeff() <= 1e-8);
  }

  TEST_CASE("sample_lifted moment checks at n=50000") {
    const TransformMatrix d = TransformMatrix::identity(2);
    const GaussianSplitParams params =
        build_params(Matrix::Identity(2, 2), d, 0.5, SMode::Independent);
    Rng rng(11);
    const Index n = 50000;
    const LiftedDesign lifted = sample_lifted(params, n, rng);

    const Matrix cov_a = empirical_cov(lifted.a, lifted.a);
    CHECK((cov_a - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <=
          3.0 * 0.5 * std::sqrt(2.0 / n) + 0.01);

    // Independent s: cov(A_j, A~_j) = alpha - s_j = 0.
    const Matrix cross = empirical_cov(lifted.a, lifted.a_tilde);
    CHECK(std::abs(cross(0, 0)) <= 0.02);
    CHECK(std::abs(cross(1, 1)) <= 0.02);
  }

  TEST_CASE("reconstruction x_tilde + a D recovers X") {
    const Matrix sigma = ar_cov3(0.5);
    Matrix d2(2, 3);
    d2 << 1, -1, 0, 0, 1, -1;
    const TransformMatrix d = TransformMatrix::graph_difference(d2);
    const GaussianSplitParams params =
        build_params(sigma, d, std::nullopt, SMode::MaxEqui);
    Rng rng(7);
    Matrix x(40, 3);
    for (Index i = 0; i < x.size(); ++i) x(i / 3, i % 3) = rng.normal();
    const LiftedDesign lifted = lift_observed(params, x, rng);
    CHECK((lifted.x_tilde + lifted.a * d.d - x).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("general params joint covariance is PSD and blocks match") {
    const Matrix sigma = ar_cov3(0.5);
    Matrix d2(2, 3);
    d2 << 1, -1, 0, 0, 1, -1;
    const TransformMatrix d = TransformMatrix::graph_difference(d2);
    const double alpha = max_feasible_alpha(sigma, d);
    const Vector s = Vector::Constant(2, alpha);
    const GeneralSplitParams gp = GeneralSplitParams::build(
        sigma, alpha * Matrix::Identity(2, 2), alpha * d.d, s, d);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(gp.joint_covariance());
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8);

    const Matrix at_d = (alpha * d.d).transpose() * d.d;
    const Matrix expect = sigma - at_d - at_d.transpose() +
                          d.d.transpose() * (alpha * Matrix::Identity(2, 2)) *
                              d.d;
    CHECK((gp.sigma_xtilde - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("general sampler: power-optimal cross-covariance decouples") {
    // Sigma_AX = Sigma_A D makes C = 0, so X~ and A are uncorrelated.
    const Matrix sigma = ar_cov3(0.5);
    Matrix d2(2, 3);
    d2 << 1, -1, 0, 0, 1, -1;
    const TransformMatrix d = TransformMatrix::graph_difference(d2);
    const double alpha = max_feasible_alpha(sigma, d);
    const GeneralSplitParams gp = GeneralSplitParams::build(
        sigma, alpha * Matrix::Identity(2, 2), alpha * d.d,
        Vector::Constant(2, alpha), d);
    Rng rng(13);
    const Index n = 50000;
    const LiftedDesign lifted = sample_lifted_general(gp, n, rng);
    CHECK(empirical_cov(lifted.x_tilde, lifted.a).cwiseAbs().maxCoeff() <=
          4.0 / std::sqrt(static_cast<double>(n)) + 0.01);
  }

  TEST_CASE("general sampler: zero cross-covariance couples A to x_tilde") {
    // Sigma_AX = 0, Sigma_A = alpha I: E[A | x~] = -alpha D Sigma_X~^-1 x~.
    const Matrix sigma = Matrix::Identity(1, 1);
    const TransformMatrix d = TransformMatrix::identity(1);
    const double alpha = 0.25;
    const GeneralSplitParams gp = GeneralSplitParams::build(
        sigma, alpha * Matrix::Identity(1, 1), Matrix::Zero(1, 1),
        Vector::Constant(1, alpha), d);
    // Sigma_X~ = 1 + alpha; regression slope of A on x~ is -alpha / (1+alpha).
    Rng rng(17);
    const Index n = 50000;
    const LiftedDesign lifted = sample_lifted_general(gp, n, rng);
    const double slope = lifted.a.col(0).dot(lifted.x_tilde.col(0)) /
                         lifted.x_tilde.col(0).squaredNorm();
    CHECK(slope == doctest::Approx(-alpha / (1.0 + alpha)).epsilon(0.15));
  }

  TEST_CASE("general sampler: s = 0 copies A exactly") {
    const Matrix sigma = ar_cov3(0.5);
    Matrix d2(2, 3);
    d2 << 1, -1, 0, 0, 1, -1;
    const TransformMatrix d = TransformMatrix::graph_difference(d2);
    const double alpha = max_feasible_alpha(sigma, d);
    const GeneralSplitParams gp = GeneralSplitParams::build(
        sigma, alpha * Matrix::Identity(2, 2), alpha * d.d, Vector::Zero(2), d);
    Rng rng(19);
    const LiftedDesign lifted = sample_lifted_general(gp, 50, rng);
    CHECK((lifted.a - lifted.a_tilde).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("single-coordinate swap leaves the joint covariance unchanged") {
    const TransformMatrix d = TransformMatrix::identity(2);
    const GaussianSplitParams params =
        build_params(Matrix::Identity(2, 2), d, 0.5, SMode::Independent);
    Rng rng(23);
    const Index n = 20000;
    const LiftedDesign lifted = sample_lifted(params, n, rng);

    Matrix joint(n, 6);
    joint << lifted.x_tilde, lifted.a, lifted.a_tilde;
    Matrix swapped = joint;
    swapped.col(2).swap(swapped.col(4));  // A_1 <-> A~_1

    const Matrix c0 = empirical_cov(joint, joint);
    const Matrix c1 = empirical_cov(swapped, swapped);
    CHECK((c0 - c1).cwiseAbs().maxCoeff() <=
          4.0 / std::sqrt(static_cast<double>(n)) + 0.02);
  }
}
