#include <cmath>

#include "doctest.h"
#include "splitknock/simlab.hpp"

using namespace splitknock;

namespace {

GaussianSimConfig tiny_gaussian() {
  GaussianSimConfig cfg;
  cfg.p = 10;
  cfg.k = 4;
  cfg.amp = 2.0;
  cfg.n_list = {150, 300};
  cfg.reps = 4;
  cfg.fast = true;
  cfg.with_baseline = false;
  cfg.seed = 42;
  return cfg;
}

}  // namespace

TEST_SUITE("simlab") {
  TEST_CASE("AR covariance hand values") {
    const Matrix s2 = gen_ar_cov(2, 0.5);
    CHECK(s2(0, 0) == 1.0);
    CHECK(s2(0, 1) == 0.5);
    CHECK(s2(1, 0) == 0.5);
    CHECK(s2(1, 1) == 1.0);

    CHECK(gen_ar_cov(4, 0.0).isApprox(Matrix::Identity(4, 4)));

    Eigen::SelfAdjointEigenSolver<Matrix> eig(gen_ar_cov(3, 0.5));
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }

  TEST_CASE("signal pattern follows the residue rule") {
    const Vector b = gen_beta_star(6, 3, 1.0);
    Vector want(6);
    want << 0, 1, 1, 0, 0, 0;
    CHECK(b == want);

    CHECK(gen_beta_star(5, 0, 1.0).cwiseAbs().maxCoeff() == 0.0);

    const Vector big = gen_beta_star(100, 20, 1.0);
    CHECK((big.array() != 0.0).count() == 13);
    CHECK(big[1] == 1.0);   // i=2
    CHECK(big[2] == 1.0);   // i=3
    CHECK(big[19] == 1.0);  // i=20
    CHECK(big[20] == 0.0);  // i=21 > k
  }

  TEST_CASE("transform factory shapes and entries") {
    const TransformMatrix d1 = make_D(DKind::D1, 4);
    CHECK(d1.d.isApprox(Matrix::Identity(4, 4)));
    CHECK(d1.kind == TransformKind::Identity);

    const TransformMatrix d2 = make_D(DKind::D2, 3);
    Matrix want(2, 3);
    want << 1, -1, 0, 0, 1, -1;
    CHECK(d2.d == want);
    CHECK(d2.kind == TransformKind::GraphDifference);

    const TransformMatrix d3 = make_D(DKind::D3, 3);
    CHECK(d3.rows() == 5);
    CHECK(d3.cols() == 3);
    CHECK(d3.d.topRows(3).isApprox(Matrix::Identity(3, 3)));
    CHECK(d3.d.bottomRows(2) == want);
  }

  TEST_CASE("logistic responses have the right means") {
    Rng rng(1);
    const Index n = 20000;
    Matrix x = Matrix::Ones(n, 1);

    Vector zero = Vector::Zero(1);
    const Vector y0 = gen_logistic(x, zero, rng);
    const double mean0 = y0.mean();
    CHECK(std::abs(mean0 - 0.5) <= 4.0 / (2.0 * std::sqrt(n)));
    for (Index i = 0; i < n; ++i) CHECK((y0[i] == 0.0 || y0[i] == 1.0));

    Vector strong = Vector::Constant(1, 10.0);
    const Vector y1 = gen_logistic(x, strong, rng);
    CHECK(y1.mean() >= 0.99);

    Rng a(7), b(7);
    const Vector ya = gen_logistic(x.topRows(100), zero, a);
    const Vector yb = gen_logistic(x.topRows(100), zero, b);
    CHECK(ya == yb);
  }

  TEST_CASE("pairwise generator on two items") {
    Rng rng(5);
    const PairwiseInstance inst = gen_pairwise(2, 1.0, 50, rng);
    CHECK(inst.graph.m() == 1);
    CHECK(inst.truth.gamma_star.size() == 1);
    CHECK(inst.truth.gamma_star[0] ==
          doctest::Approx(inst.truth.beta_star[0] - inst.truth.beta_star[1]));
    CHECK(inst.ds.n() == 50);
    for (Index i = 0; i < inst.ds.n(); ++i)
      CHECK((inst.ds.y[i] == 1.0 || inst.ds.y[i] == -1.0));
  }

  TEST_CASE("pairwise rows pick edges uniformly") {
    Rng rng(9);
    const Index p = 5, n = 100000;
    const PairwiseInstance inst = gen_pairwise(p, 0.5, n, rng);
    const Index m = p * (p - 1) / 2;
    REQUIRE(inst.graph.m() == m);
    Vector counts = Vector::Zero(m);
    for (Index i = 0; i < n; ++i) {
      const auto [edge, sign] = inst.graph.edge_of_row(inst.ds.x.row(i));
      (void)sign;
      counts[edge] += 1.0;
    }
    const double expect = static_cast<double>(n) / static_cast<double>(m);
    const double se = std::sqrt(expect * (1.0 - 1.0 / m));
    for (Index e = 0; e < m; ++e) CHECK(std::abs(counts[e] - expect) <= 4 * se);
  }

  TEST_CASE("pairwise sparsity zeroes the tail of beta") {
    Rng rng(11);
    const PairwiseInstance inst = gen_pairwise(10, 0.3, 20, rng);
    for (Index j = 3; j < 10; ++j) CHECK(inst.truth.beta_star[j] == 0.0);
    CHECK(inst.truth.beta_star.head(3).cwiseAbs().minCoeff() > 0.0);
  }

  TEST_CASE("tiny Gaussian experiment obeys range contracts") {
    const GaussianSimConfig cfg = tiny_gaussian();
    const ExperimentTable table = run_gaussian_experiment(cfg);
    CHECK(table.rows.size() == cfg.n_list.size() * cfg.reps);
    CHECK(table.aggregates.size() == cfg.n_list.size());
    for (const ReplicateRow& r : table.rows) {
      CHECK(r.fdp >= 0.0);
      CHECK(r.fdp <= 1.0);
      CHECK(r.power >= 0.0);
      CHECK(r.power <= 1.0);
      CHECK(r.selected_count >= 0);
    }
  }

  TEST_CASE("pure-null config keeps power at zero and mFDR near q") {
    GaussianSimConfig cfg = tiny_gaussian();
    cfg.amp = 0.0;
    cfg.n_list = {200};
    cfg.reps = 100;
    const ExperimentTable table = run_gaussian_experiment(cfg);
    for (const ReplicateRow& r : table.rows) CHECK(r.power == 0.0);
    const double se = std::sqrt(cfg.q * (1 - cfg.q) / cfg.reps);
    CHECK(table.aggregates[0].summary.mfdr_proxy <= cfg.q + 4 * se);
  }

  TEST_CASE("identical configs give bit-identical tables") {
    const GaussianSimConfig cfg = tiny_gaussian();
    const ExperimentTable t1 = run_gaussian_experiment(cfg);
    const ExperimentTable t2 = run_gaussian_experiment(cfg);
    REQUIRE(t1.rows.size() == t2.rows.size());
    for (std::size_t i = 0; i < t1.rows.size(); ++i) {
      CHECK(t1.rows[i].fdp == t2.rows[i].fdp);
      CHECK(t1.rows[i].power == t2.rows[i].power);
      CHECK(t1.rows[i].selected_count == t2.rows[i].selected_count);
    }
  }

  TEST_CASE("thread count does not change the results") {
    GaussianSimConfig cfg = tiny_gaussian();
    cfg.threads = 1;
    const ExperimentTable serial = run_gaussian_experiment(cfg);
    cfg.threads = 2;
    const ExperimentTable parallel = run_gaussian_experiment(cfg);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
      CHECK(serial.rows[i].fdp == parallel.rows[i].fdp);
      CHECK(serial.rows[i].power == parallel.rows[i].power);
      CHECK(serial.rows[i].selected_count == parallel.rows[i].selected_count);
    }
  }

  TEST_CASE("tiny pairwise experiment runs both constructions") {
    PairwiseSimConfig cfg;
    cfg.p = 5;
    cfg.n_list = {200};
    cfg.reps = 3;
    cfg.fast = true;
    cfg.seed = 7;
    for (PairwiseConstruction c :
         {PairwiseConstruction::BootstrapPlus, PairwiseConstruction::Sequential}) {
      cfg.construction = c;
      const ExperimentTable table = run_pairwise_experiment(cfg);
      CHECK(table.rows.size() == 3);
      for (const ReplicateRow& r : table.rows) {
        CHECK(r.fdp >= 0.0);
        CHECK(r.fdp <= 1.0);
        CHECK(r.power >= 0.0);
        CHECK(r.power <= 1.0);
        CHECK(r.wall_ms >= 0.0);
      }
    }
  }

  TEST_CASE("config validation") {
    GaussianSimConfig g = tiny_gaussian();
    g.c = 1.0;
    CHECK_THROWS_AS(g.validate(), EmptyInput);
    g = tiny_gaussian();
    g.k = g.p + 1;
    CHECK_THROWS_AS(g.validate(), EmptyInput);
    g = tiny_gaussian();
    g.reps = 0;
    CHECK_THROWS_AS(g.validate(), EmptyInput);

    PairwiseSimConfig pw;
    pw.sparsity = 0.0;
    CHECK_THROWS_AS(pw.validate(), EmptyInput);
    pw.sparsity = 1.5;
    CHECK_THROWS_AS(pw.validate(), EmptyInput);
  }
}
