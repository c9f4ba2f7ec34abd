#include "splitknock/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace splitknock {

namespace {

// All reductions over the (gamma, gamma_tilde) blocks are accumulated as
// per-index pairs (f(gamma_j) + f(gamma_tilde_j)). A swap of the pair j in the
// design then reproduces every float bit-exactly with the roles exchanged,
// which is what makes the flip-sign property of W hold exactly after a refit.

double pair_sum(const Vector& ag, const Vector& at,
                const auto& term) {
  double acc = 0.0;
  for (Index j = 0; j < ag.size(); ++j) acc += (term(ag[j]) + term(at[j]));
  return acc;
}

double pair_dot(const Vector& ug, const Vector& ut, const Vector& vg,
                const Vector& vt) {
  double acc = 0.0;
  for (Index j = 0; j < ug.size(); ++j) acc += (ug[j] * vg[j] + ut[j] * vt[j]);
  return acc;
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

struct Point {
  Vector beta, gamma, gt;
};

struct Grad {
  Vector beta, gamma, gt;
  double value = 0.0;
};

class SmoothModel {
 public:
  SmoothModel(const LiftedDesign& design, Loss loss, const TransformMatrix& d,
              double coupling)
      : design_(design), loss_(loss), d_(d), coupling_(coupling) {
    n_ = design.n();
    pdim_ = coupling_ > 0.0 ? d.cols() : 0;
    m_ = design.a.cols();
  }

  Index n() const { return n_; }
  Index pdim() const { return pdim_; }
  Index m() const { return m_; }

  Vector predict(const Point& z) const {
    Vector eta = pdim_ > 0 ? Vector(design_.x_tilde * z.beta)
                           : Vector(Vector::Zero(n_));
    for (Index k = 0; k < m_; ++k)
      eta.array() += (design_.a.col(k).array() * z.gamma[k] +
                      design_.a_tilde.col(k).array() * z.gt[k]);
    return eta;
  }

  // Loss value plus d(loss)/d(eta).
  double loss_value_grad(const Vector& eta, Vector& gl) const {
    const Vector& y = design_.y;
    gl.resize(n_);
    double acc = 0.0;
    if (loss_ == Loss::Squared) {
      for (Index i = 0; i < n_; ++i) {
        const double r = eta[i] - y[i];
        acc += 0.5 * r * r;
        gl[i] = r;
      }
    } else {
      for (Index i = 0; i < n_; ++i) {
        const double e = eta[i];
        acc += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) -
               y[i] * e;
        gl[i] = 1.0 / (1.0 + std::exp(-e)) - y[i];
      }
    }
    gl /= static_cast<double>(n_);
    return acc / static_cast<double>(n_);
  }

  double loss_value(const Vector& eta) const {
    const Vector& y = design_.y;
    double acc = 0.0;
    if (loss_ == Loss::Squared) {
      for (Index i = 0; i < n_; ++i) {
        const double r = eta[i] - y[i];
        acc += 0.5 * r * r;
      }
    } else {
      for (Index i = 0; i < n_; ++i) {
        const double e = eta[i];
        acc += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) -
               y[i] * e;
      }
    }
    return acc / static_cast<double>(n_);
  }

  double value(const Point& z) const {
    double v = loss_value(predict(z));
    if (coupling_ > 0.0) {
      const Vector w = d_.d * z.beta;
      double acc = 0.0;
      for (Index j = 0; j < m_; ++j) {
        const double rg = w[j] - z.gamma[j];
        const double rt = w[j] - z.gt[j];
        acc += (rg * rg + rt * rt);
      }
      v += 0.5 * coupling_ * acc;
    }
    return v;
  }

  Grad value_grad(const Point& z) const {
    Grad g;
    Vector gl;
    const Vector eta = predict(z);
    g.value = loss_value_grad(eta, gl);

    g.gamma.resize(m_);
    g.gt.resize(m_);
    Vector w;
    if (coupling_ > 0.0) w = d_.d * z.beta;
    double acc = 0.0;
    for (Index j = 0; j < m_; ++j) {
      double gg = design_.a.col(j).dot(gl);
      double gt = design_.a_tilde.col(j).dot(gl);
      if (coupling_ > 0.0) {
        const double rg = w[j] - z.gamma[j];
        const double rt = w[j] - z.gt[j];
        acc += (rg * rg + rt * rt);
        gg -= coupling_ * rg;
        gt -= coupling_ * rt;
      }
      g.gamma[j] = gg;
      g.gt[j] = gt;
    }
    if (coupling_ > 0.0) {
      g.value += 0.5 * coupling_ * acc;
      Vector cvec(m_);
      for (Index j = 0; j < m_; ++j)
        cvec[j] = 2.0 * w[j] - (z.gamma[j] + z.gt[j]);
      g.beta = design_.x_tilde.transpose() * gl +
               coupling_ * (d_.d.transpose() * cvec);
    } else {
      g.beta.resize(0);
    }
    return g;
  }

  // Upper Lipschitz estimate from Frobenius norms; swap-invariant because the
  // per-pair column norms are summed commutatively.
  double lipschitz_bound() const {
    double msq = pdim_ > 0 ? design_.x_tilde.squaredNorm() : 0.0;
    for (Index k = 0; k < m_; ++k)
      msq += (design_.a.col(k).squaredNorm() + design_.a_tilde.col(k).squaredNorm());
    const double lmax = loss_ == Loss::Squared ? 1.0 : 0.25;
    double lip = lmax * msq / static_cast<double>(n_);
    if (coupling_ > 0.0) lip += 2.0 * coupling_ * (d_.d.squaredNorm() + 1.0);
    return lip > 0 ? lip : 1.0;
  }

 private:
  const LiftedDesign& design_;
  Loss loss_;
  const TransformMatrix& d_;
  double coupling_;
  Index n_, pdim_, m_;
};

double l1_penalty(double lambda, const Point& z) {
  if (lambda == 0.0) return 0.0;
  return lambda * pair_sum(z.gamma, z.gt, [](double v) { return std::abs(v); });
}

double kkt_residual(const SmoothModel& model, double lambda, const Point& z) {
  const Grad g = model.value_grad(z);
  double res = 0.0;
  if (g.beta.size() > 0) res = g.beta.cwiseAbs().maxCoeff();
  auto coord = [&](double gamma_j, double grad_j) {
    if (gamma_j > 0.0) return std::abs(grad_j + lambda);
    if (gamma_j < 0.0) return std::abs(grad_j - lambda);
    return std::max(0.0, std::abs(grad_j) - lambda);
  };
  for (Index j = 0; j < z.gamma.size(); ++j) {
    res = std::max(res, coord(z.gamma[j], g.gamma[j]));
    res = std::max(res, coord(z.gt[j], g.gt[j]));
  }
  return res;
}

}  // namespace

void SplitProblem::validate() const {
  if (nu <= 0.0) throw NonFiniteInput("nu must be positive");
  if (lambda < 0.0) throw NonFiniteInput("lambda must be nonnegative");
  if (design.m() != d.rows() || design.p() != d.cols())
    throw DimensionMismatch("design dimensions inconsistent with transform");
  if (design.y.size() != design.n())
    throw DimensionMismatch("response length does not match design rows");
}

double objective(const SplitProblem& pr, const Vector& beta, const Vector& gamma,
                 const Vector& gamma_tilde) {
  pr.validate();
  if (beta.size() != pr.d.cols() || gamma.size() != pr.d.rows() ||
      gamma_tilde.size() != pr.d.rows())
    throw DimensionMismatch("coefficient block sizes do not match the problem");
  if (!beta.allFinite() || !gamma.allFinite() || !gamma_tilde.allFinite())
    throw NonFiniteInput("coefficients contain non-finite values");
  SmoothModel model(pr.design, pr.loss, pr.d, 2.0 / pr.nu);
  Point z{beta, gamma, gamma_tilde};
  return model.value(z) + l1_penalty(pr.lambda, z);
}

double smooth_value_grad(const SplitProblem& pr, const Vector& beta,
                         const Vector& gamma, const Vector& gamma_tilde,
                         Vector& grad_beta, Vector& grad_gamma,
                         Vector& grad_gamma_tilde) {
  SmoothModel model(pr.design, pr.loss, pr.d, 2.0 / pr.nu);
  Grad g = model.value_grad(Point{beta, gamma, gamma_tilde});
  grad_beta = g.beta;
  grad_gamma = g.gamma;
  grad_gamma_tilde = g.gt;
  return g.value;
}

namespace detail {

SplitSolution fit_core(const LiftedDesign& design, Loss loss,
                       const TransformMatrix& d, double coupling, double lambda,
                       const SplitSolution* init, const SolverSettings& settings) {
  SmoothModel model(design, loss, d, coupling);
  const Index pdim = model.pdim();
  const Index m = model.m();

  Point z;
  if (init) {
    z.beta = init->beta;
    z.gamma = init->gamma;
    z.gt = init->gamma_tilde;
  } else {
    z.beta = Vector::Zero(pdim);
    z.gamma = Vector::Zero(m);
    z.gt = Vector::Zero(m);
  }
  Point z_prev = z;

  double step = 1.0 / model.lipschitz_bound();
  double fista_t = 1.0;
  double obj = model.value(z) + l1_penalty(lambda, z);

  int iter = 0;
  bool stalled = false;
  for (; iter < settings.max_iter; ++iter) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * fista_t * fista_t));
    const double omega = (fista_t - 1.0) / t_next;

    auto attempt = [&](const Point& y) -> Point {
      const Grad g = model.value_grad(y);
      step *= settings.step_growth;
      while (true) {
        Point cand;
        if (pdim > 0) cand.beta = y.beta - step * g.beta;
        cand.gamma.resize(m);
        cand.gt.resize(m);
        const double thr = step * lambda;
        for (Index j = 0; j < m; ++j) {
          cand.gamma[j] = soft_threshold(y.gamma[j] - step * g.gamma[j], thr);
          cand.gt[j] = soft_threshold(y.gt[j] - step * g.gt[j], thr);
        }
        // Quadratic upper bound check at y.
        double ip = 0.0, sq = 0.0;
        if (pdim > 0) {
          ip = g.beta.dot(cand.beta - y.beta);
          sq = (cand.beta - y.beta).squaredNorm();
        }
        Vector dg = cand.gamma - y.gamma;
        Vector dt = cand.gt - y.gt;
        ip += pair_dot(g.gamma, g.gt, dg, dt);
        sq += pair_dot(dg, dt, dg, dt);
        const double bound = g.value + ip + 0.5 * sq / step;
        const double val = model.value(cand);
        if (val <= bound + 1e-15 * std::max(1.0, std::abs(bound))) return cand;
        step *= settings.backtrack_shrink;
        if (step < 1e-18) return cand;
      }
    };

    Point y;
    y.beta = z.beta + omega * (z.beta - z_prev.beta);
    y.gamma = z.gamma + omega * (z.gamma - z_prev.gamma);
    y.gt = z.gt + omega * (z.gt - z_prev.gt);

    Point cand = attempt(y);
    double cand_obj = model.value(cand) + l1_penalty(lambda, cand);
    bool restarted = false;
    if (!(cand_obj <= obj + 1e-12)) {
      // Momentum overshoot: fall back to a plain forward-backward step from z,
      // which the backtracking condition makes a descent step.
      cand = attempt(z);
      cand_obj = model.value(cand) + l1_penalty(lambda, cand);
      restarted = true;
    }
    if (!std::isfinite(cand_obj))
      throw NonFiniteIterate("objective diverged; check problem scaling");

    z_prev = z;
    z = cand;
    fista_t = restarted ? 1.0 : t_next;

    const double decrease = obj - cand_obj;
    const double rel = decrease / std::max(1.0, std::abs(obj));
    obj = std::min(obj, cand_obj);
    if (rel < settings.tol_rel_obj && rel >= 0.0) {
      // Two consecutive stalls (past any momentum restart) suggest we are
      // done, but only stop once the KKT conditions actually hold; otherwise
      // keep grinding until max_iter.
      if (stalled &&
          kkt_residual(model, lambda, z) <= settings.kkt_tol * (1.0 + lambda)) {
        ++iter;
        break;
      }
      stalled = true;
    } else {
      stalled = false;
    }
  }

  SplitSolution sol;
  sol.beta = z.beta;
  sol.gamma = z.gamma;
  sol.gamma_tilde = z.gt;
  sol.objective = obj;
  sol.iterations = iter;
  sol.converged =
      kkt_residual(model, lambda, z) <= settings.kkt_tol * (1.0 + lambda);
  return sol;
}

}  // namespace detail

SplitSolution fit(const SplitProblem& pr, const SplitSolution* init,
                  const SolverSettings& settings) {
  pr.validate();
  return detail::fit_core(pr.design, pr.loss, pr.d, 2.0 / pr.nu, pr.lambda, init,
                          settings);
}

std::vector<SplitSolution> fit_path(const LiftedDesign& design, Loss loss,
                                    const TransformMatrix& d, double nu,
                                    const std::vector<double>& lambdas,
                                    const SolverSettings& settings) {
  if (lambdas.empty()) throw EmptyGrid("lambda path is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] <= 0.0) throw EmptyGrid("path lambdas must be positive");
    if (i > 0 && lambdas[i] >= lambdas[i - 1])
      throw EmptyGrid("path lambdas must be strictly descending");
  }
  std::vector<SplitSolution> out;
  out.reserve(lambdas.size());
  const SplitSolution* warm = nullptr;
  for (double lam : lambdas) {
    SplitProblem pr{design, loss, nu, lam, d};
    out.push_back(fit(pr, warm, settings));
    warm = &out.back();
  }
  return out;
}

double prediction_loss(const LiftedDesign& design, Loss loss, const Vector& beta,
                       const Vector& gamma, const Vector& gamma_tilde) {
  Vector eta = design.x_tilde * beta;
  eta += design.a * gamma + design.a_tilde * gamma_tilde;
  const Index n = design.n();
  double acc = 0.0;
  if (loss == Loss::Squared) {
    for (Index i = 0; i < n; ++i) {
      const double r = eta[i] - design.y[i];
      acc += 0.5 * r * r;
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      const double e = eta[i];
      acc += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) -
             design.y[i] * e;
    }
  }
  return acc / static_cast<double>(n);
}

namespace {

LiftedDesign take_rows(const LiftedDesign& design, const std::vector<int>& rows) {
  LiftedDesign out;
  out.x_tilde.resize(static_cast<Index>(rows.size()), design.p());
  out.a.resize(static_cast<Index>(rows.size()), design.m());
  out.a_tilde.resize(static_cast<Index>(rows.size()), design.m());
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x_tilde.row(static_cast<Index>(i)) = design.x_tilde.row(rows[i]);
    out.a.row(static_cast<Index>(i)) = design.a.row(rows[i]);
    out.a_tilde.row(static_cast<Index>(i)) = design.a_tilde.row(rows[i]);
    out.y[static_cast<Index>(i)] = design.y[rows[i]];
  }
  return out;
}

}  // namespace

CvTable cross_validate_table(const LiftedDesign& design, Loss loss,
                             const TransformMatrix& d,
                             const std::vector<double>& lambda_grid,
                             const std::vector<double>& nu_grid, int folds,
                             std::uint64_t seed,
                             const SolverSettings& settings) {
  if (lambda_grid.empty() || nu_grid.empty()) throw EmptyGrid("empty CV grid");
  if (folds < 2) throw EmptyGrid("need at least 2 folds");
  const Index n = design.n();

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng.engine());

  std::vector<std::vector<int>> fold_rows(static_cast<std::size_t>(folds));
  for (Index i = 0; i < n; ++i)
    fold_rows[static_cast<std::size_t>(i) % folds].push_back(perm[i]);

  CvTable table;
  table.lambdas = lambda_grid;
  std::sort(table.lambdas.begin(), table.lambdas.end(), std::greater<>());
  table.lambdas.erase(std::unique(table.lambdas.begin(), table.lambdas.end()),
                      table.lambdas.end());
  table.nus = nu_grid;
  std::sort(table.nus.begin(), table.nus.end(), std::greater<>());
  table.nus.erase(std::unique(table.nus.begin(), table.nus.end()),
                  table.nus.end());
  const Index nl = static_cast<Index>(table.lambdas.size());
  const Index nv = static_cast<Index>(table.nus.size());

  Matrix sum = Matrix::Zero(nv, nl);
  Matrix sumsq = Matrix::Zero(nv, nl);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_rows;
    for (int g = 0; g < folds; ++g)
      if (g != f)
        train_rows.insert(train_rows.end(), fold_rows[g].begin(),
                          fold_rows[g].end());
    const LiftedDesign train = take_rows(design, train_rows);
    const LiftedDesign test = take_rows(design, fold_rows[f]);
    for (Index vi = 0; vi < nv; ++vi) {
      const auto path =
          fit_path(train, loss, d, table.nus[vi], table.lambdas, settings);
      for (Index li = 0; li < nl; ++li) {
        const double v = prediction_loss(test, loss, path[li].beta,
                                         path[li].gamma, path[li].gamma_tilde);
        sum(vi, li) += v;
        sumsq(vi, li) += v * v;
      }
    }
  }

  const double k = static_cast<double>(folds);
  table.mean_loss = sum / k;
  table.se_loss.resize(nv, nl);
  for (Index vi = 0; vi < nv; ++vi)
    for (Index li = 0; li < nl; ++li) {
      const double var =
          std::max(0.0, sumsq(vi, li) / k -
                            table.mean_loss(vi, li) * table.mean_loss(vi, li));
      table.se_loss(vi, li) = std::sqrt(var / std::max(1.0, k - 1.0));
    }
  return table;
}

std::pair<double, double> CvTable::minimizer() const {
  double best_loss = std::numeric_limits<double>::infinity();
  double best_lambda = lambdas.front();
  double best_nu = nus.front();
  for (std::size_t vi = 0; vi < nus.size(); ++vi) {
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      const double v = mean_loss(static_cast<Index>(vi), static_cast<Index>(li));
      const bool better =
          v < best_loss ||
          (v == best_loss && (lambdas[li] > best_lambda ||
                              (lambdas[li] == best_lambda && nus[vi] > best_nu)));
      if (better) {
        best_loss = v;
        best_lambda = lambdas[li];
        best_nu = nus[vi];
      }
    }
  }
  return {best_lambda, best_nu};
}

std::pair<double, double> CvTable::one_se_choice() const {
  double best_loss = std::numeric_limits<double>::infinity();
  double best_se = 0.0;
  for (std::size_t vi = 0; vi < nus.size(); ++vi)
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      const double v = mean_loss(static_cast<Index>(vi), static_cast<Index>(li));
      if (v < best_loss) {
        best_loss = v;
        best_se = se_loss(static_cast<Index>(vi), static_cast<Index>(li));
      }
    }
  const double cutoff = best_loss + best_se;
  // Grids are descending, so the first admissible entry scanning by lambda
  // (outer) then nu is the sparsest choice.
  for (std::size_t li = 0; li < lambdas.size(); ++li)
    for (std::size_t vi = 0; vi < nus.size(); ++vi)
      if (mean_loss(static_cast<Index>(vi), static_cast<Index>(li)) <= cutoff)
        return {lambdas[li], nus[vi]};
  return minimizer();
}

std::pair<double, double> cross_validate(const LiftedDesign& design, Loss loss,
                                         const TransformMatrix& d,
                                         const std::vector<double>& lambda_grid,
                                         const std::vector<double>& nu_grid,
                                         int folds, std::uint64_t seed,
                                         const SolverSettings& settings) {
  return cross_validate_table(design, loss, d, lambda_grid, nu_grid, folds,
                              seed, settings)
      .minimizer();
}

WVector w_statistics(const SplitSolution& sol) {
  WVector w;
  w.w.resize(sol.gamma.size());
  for (Index j = 0; j < sol.gamma.size(); ++j)
    w.w[j] = std::abs(sol.gamma[j]) - std::abs(sol.gamma_tilde[j]);
  return w;
}

std::vector<double> log10_grid(double lo, double hi, double step) {
  std::vector<double> out;
  const int count = static_cast<int>(std::round((hi - lo) / step)) + 1;
  for (int i = count - 1; i >= 0; --i) out.push_back(std::pow(10.0, lo + i * step));
  return out;
}

std::vector<double> default_lambda_grid() { return log10_grid(-2.0, -1.0, 0.05); }
std::vector<double> default_nu_grid() { return log10_grid(0.0, 1.0, 0.05); }

}  // namespace splitknock
