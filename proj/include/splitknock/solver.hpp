#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "splitknock/rng.hpp"
#include "splitknock/types.hpp"

namespace splitknock {

enum class Loss { Squared, Logistic };

struct SolverSettings {
  double tol_rel_obj = 1e-8;
  int max_iter = 50000;
  double kkt_tol = 1e-5;
  double backtrack_shrink = 0.5;
  double step_growth = 1.3;
};

// Split-penalized problem (squared/logistic loss, Euclidean coupling 1/nu,
// l1 weight lambda on the gamma blocks).
struct SplitProblem {
  LiftedDesign design;
  Loss loss = Loss::Squared;
  double nu = 1.0;
  double lambda = 0.0;
  TransformMatrix d;

  void validate() const;
};

struct SplitSolution {
  Vector beta;
  Vector gamma;
  Vector gamma_tilde;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

double objective(const SplitProblem& pr, const Vector& beta, const Vector& gamma,
                 const Vector& gamma_tilde);

// Value and gradient of the smooth part (loss + coupling quadratics); exposed
// for finite-difference checks and the KKT test.
double smooth_value_grad(const SplitProblem& pr, const Vector& beta,
                         const Vector& gamma, const Vector& gamma_tilde,
                         Vector& grad_beta, Vector& grad_gamma,
                         Vector& grad_gamma_tilde);

SplitSolution fit(const SplitProblem& pr,
                  const SplitSolution* init = nullptr,
                  const SolverSettings& settings = {});

// Warm-started solutions over a strictly descending lambda grid.
std::vector<SplitSolution> fit_path(const LiftedDesign& design, Loss loss,
                                    const TransformMatrix& d, double nu,
                                    const std::vector<double>& lambdas,
                                    const SolverSettings& settings = {});

// K-fold cross validation over rows; returns (lambda_hat, nu_hat) minimizing
// mean held-out loss, ties broken toward larger lambda then larger nu.
std::pair<double, double> cross_validate(const LiftedDesign& design, Loss loss,
                                         const TransformMatrix& d,
                                         const std::vector<double>& lambda_grid,
                                         const std::vector<double>& nu_grid,
                                         int folds, std::uint64_t seed,
                                         const SolverSettings& settings = {});

// Full cross-validation surface: per-(nu, lambda) mean held-out loss across
// folds plus the standard error of that mean, for selection rules beyond the
// plain minimizer (e.g. the one-standard-error rule).
struct CvTable {
  std::vector<double> lambdas;  // descending
  std::vector<double> nus;     // descending
  Matrix mean_loss;            // nus.size() x lambdas.size()
  Matrix se_loss;

  std::pair<double, double> minimizer() const;
  // Sparsest (largest lambda, then largest nu) point whose mean loss is within
  // one standard error of the minimum.
  std::pair<double, double> one_se_choice() const;
};

CvTable cross_validate_table(const LiftedDesign& design, Loss loss,
                             const TransformMatrix& d,
                             const std::vector<double>& lambda_grid,
                             const std::vector<double>& nu_grid, int folds,
                             std::uint64_t seed,
                             const SolverSettings& settings = {});

WVector w_statistics(const SplitSolution& sol);

// Held-out prediction loss (no penalty) of a solution on a design.
double prediction_loss(const LiftedDesign& design, Loss loss, const Vector& beta,
                       const Vector& gamma, const Vector& gamma_tilde);

// log10-spaced grid in [lo, hi] with the given step (descending order).
std::vector<double> log10_grid(double lo, double hi, double step);

// Defaults: log10 lambda in [-2,-1] step 0.05; log10 nu in [0,1] step 0.05.
std::vector<double> default_lambda_grid();
std::vector<double> default_nu_grid();

namespace detail {
// Proximal solver core shared with the baseline lasso: coupling weight
// c = 2/nu, or 0 to drop the coupling (and with it beta) entirely.
SplitSolution fit_core(const LiftedDesign& design, Loss loss,
                       const TransformMatrix& d, double coupling, double lambda,
                       const SplitSolution* init, const SolverSettings& settings);
}  // namespace detail

}  // namespace splitknock
