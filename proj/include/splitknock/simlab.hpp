#pragma once

#include <vector>

#include "splitknock/filter.hpp"
#include "splitknock/gaussian.hpp"
#include "splitknock/pairwise.hpp"
#include "splitknock/rng.hpp"
#include "splitknock/solver.hpp"
#include "splitknock/types.hpp"

namespace splitknock {

enum class DKind { D1, D2, D3 };
enum class PairwiseConstruction { BootstrapPlus, Sequential };

// Solver tolerances used inside Monte-Carlo experiments: looser than the
// defaults, since replicate-level noise dominates optimization error.
SolverSettings experiment_solver_settings();

// Coarse cross-validation grids sized for minute-level experiment runtimes;
// the fine per-solver defaults remain available through the config fields.
std::vector<double> coarse_lambda_grid();
std::vector<double> coarse_nu_grid();

struct GaussianSimConfig {
  Index p = 30;
  Index k = 6;
  double amp = 1.0;
  double c = 0.5;           // AR(1) correlation
  std::vector<Index> n_list{200, 500, 1000, 2000};
  double q = 0.2;
  int reps = 100;
  DKind d_kind = DKind::D1;
  SMode s_mode = SMode::MaxEqui;
  std::uint64_t seed = 1;
  int threads = 1;
  bool fast = false;        // fix (lambda, nu) at grid midpoints, skip CV
  bool cv_one_se = true;    // one-standard-error CV rule instead of the minimizer
  bool with_baseline = true;  // vanilla MX comparison; only runs when d_kind=D1
  std::vector<double> lambda_grid = coarse_lambda_grid();
  std::vector<double> nu_grid = coarse_nu_grid();
  int folds = 3;
  SolverSettings solver = experiment_solver_settings();

  void validate() const;
};

struct PairwiseSimConfig {
  Index p = 15;
  double sparsity = 0.5;    // fraction of leading beta coordinates retained
  std::vector<Index> n_list{500, 1000, 2000, 4000};
  double q = 0.2;
  int reps = 100;
  PairwiseConstruction construction = PairwiseConstruction::BootstrapPlus;
  std::uint64_t seed = 1;
  int threads = 1;
  bool fast = false;
  bool cv_one_se = true;
  std::vector<double> lambda_grid = coarse_lambda_grid();
  std::vector<double> nu_grid = coarse_nu_grid();
  int folds = 3;
  SolverSettings solver = experiment_solver_settings();

  void validate() const;
};

struct ReplicateRow {
  Index n = 0;
  int rep = 0;
  double fdp = 0.0;
  double power = 0.0;
  int selected_count = 0;
  double wall_ms = 0.0;
  double mfdr_term = 0.0;  // |S ∩ H0| / (|S| + 1/q)
};

struct AggregateRow {
  Index n = 0;
  AggregateSummary summary;
};

struct ExperimentTable {
  std::vector<ReplicateRow> rows;
  std::vector<AggregateRow> aggregates;
  // Vanilla MX baseline on the same replicates (Gaussian D1 runs only).
  std::vector<ReplicateRow> baseline_rows;
  std::vector<AggregateRow> baseline_aggregates;
};

// Sigma_{ij} = c^{|i-j|}.
Matrix gen_ar_cov(Index p, double c);

// beta_i = amp when i <= k and i mod 3 in {0, 2} (1-indexed), else 0.
Vector gen_beta_star(Index p, Index k, double amp);

TransformMatrix make_D(DKind kind, Index p);

// y_i ~ Bernoulli(sigmoid(x_i . beta)), in {0, 1}.
Vector gen_logistic(const Matrix& x, const Vector& beta_star, Rng& rng);

struct PairwiseInstance {
  Dataset ds;
  GroundTruth truth;
  ComparisonGraph graph;
};

// Bradley-Terry comparisons on a uniform random pair per row; latent scores
// are standard normal on the first floor(sparsity * p) items, zero elsewhere.
PairwiseInstance gen_pairwise(Index p, double sparsity, Index n, Rng& rng);

ExperimentTable run_gaussian_experiment(const GaussianSimConfig& cfg);
ExperimentTable run_pairwise_experiment(const PairwiseSimConfig& cfg);

}  // namespace splitknock
