// Command-line front end: experiment runners, selection on user comparison
// files, and KL diagnostics. Exit codes: 0 ok, 1 runtime error, 2 usage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "splitknock/baseline_mx.hpp"
#include "splitknock/diagnostics.hpp"
#include "splitknock/gaussian.hpp"
#include "splitknock/io.hpp"
#include "splitknock/parallel.hpp"
#include "splitknock/simlab.hpp"

namespace fs = std::filesystem;
using namespace splitknock;

namespace {

constexpr double kFastLambda = 0.03162277660168379;  // 10^-1.5
constexpr double kFastNu = 3.1622776601683795;       // 10^0.5

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_q(double q) {
  if (q <= 0.0 || q >= 1.0) throw UsageError("q must be in (0,1)");
}

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

int run_simulate_gaussian(const GaussianSimConfig& cfg, const std::string& out,
                          bool svg) {
  const ExperimentTable table = run_gaussian_experiment(cfg);
  write_text_file(out_path(out, "results.csv"), replicates_csv(table.rows));
  write_text_file(out_path(out, "aggregate.csv"),
                  aggregate_csv(table.aggregates));
  if (!table.baseline_rows.empty()) {
    write_text_file(out_path(out, "baseline_results.csv"),
                    replicates_csv(table.baseline_rows));
    write_text_file(out_path(out, "baseline_aggregate.csv"),
                    aggregate_csv(table.baseline_aggregates));
  }
  if (svg)
    write_text_file(out_path(out, "fdr_power.svg"),
                    fdr_power_svg(table.aggregates, table.baseline_aggregates,
                                  cfg.q));
  for (const AggregateRow& r : table.aggregates)
    std::cout << "n=" << r.n << " mean_fdr=" << format_number(r.summary.mean_fdr)
              << " mean_power=" << format_number(r.summary.mean_power) << "\n";
  return 0;
}

int run_simulate_pairwise(const PairwiseSimConfig& cfg, const std::string& out,
                          bool svg) {
  const std::string tag =
      cfg.construction == PairwiseConstruction::BootstrapPlus ? "bootstrap+"
                                                              : "sequential";
  const ExperimentTable table = run_pairwise_experiment(cfg);
  write_text_file(out_path(out, "results_" + tag + ".csv"),
                  replicates_csv(table.rows));
  write_text_file(out_path(out, "aggregate_" + tag + ".csv"),
                  aggregate_csv(table.aggregates));
  if (svg)
    write_text_file(out_path(out, "fdr_power_" + tag + ".svg"),
                    fdr_power_svg(table.aggregates, {}, cfg.q));
  for (const AggregateRow& r : table.aggregates)
    std::cout << "n=" << r.n << " mean_fdr=" << format_number(r.summary.mean_fdr)
              << " mean_power=" << format_number(r.summary.mean_power) << "\n";
  return 0;
}

int run_select_pairwise(const std::string& data, double q, int reps,
                        std::uint64_t seed, int threads, bool cv,
                        const std::string& out) {
  const ComparisonsData cmp = read_comparisons_csv(data);
  // Restrict the graph to pairs that actually occur in the file.
  std::set<std::pair<int, int>> seen;
  for (Index r = 0; r < cmp.ds.n(); ++r) {
    int i = -1, j = -1;
    for (Index k = 0; k < cmp.ds.p(); ++k) {
      if (cmp.ds.x(r, k) == 1.0) i = static_cast<int>(k);
      if (cmp.ds.x(r, k) == -1.0) j = static_cast<int>(k);
    }
    seen.insert({std::min(i, j), std::max(i, j)});
  }
  const ComparisonGraph g = ComparisonGraph::from_pairs(
      cmp.ds.p(), {seen.begin(), seen.end()});

  std::vector<int> hits(static_cast<std::size_t>(g.m()), 0);
  std::vector<std::vector<int>> per_rep(static_cast<std::size_t>(reps));
  const SolverSettings settings = experiment_solver_settings();
  parallel_for(reps, resolve_threads(threads), [&](int rep) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(rep));
    const LiftedDesign lifted = bootstrap_plus(cmp.ds, g, 2 * cmp.ds.n(), rng);
    double lambda_hat = kFastLambda, nu_hat = kFastNu;
    if (cv)
      std::tie(lambda_hat, nu_hat) = cross_validate(
          lifted, Loss::Logistic, g.d, coarse_lambda_grid(), coarse_nu_grid(),
          3, splitmix64(seed ^ static_cast<std::uint64_t>(rep)), settings);
    SplitProblem pr{lifted, Loss::Logistic, nu_hat, lambda_hat, g.d};
    const SplitSolution sol = fit(pr, nullptr, settings);
    per_rep[static_cast<std::size_t>(rep)] =
        select(w_statistics(sol), ThresholdRule{q, false}).selected;
  });
  for (const auto& sel : per_rep)
    for (int j : sel) ++hits[static_cast<std::size_t>(j)];

  std::vector<double> freq(hits.size());
  for (std::size_t j = 0; j < hits.size(); ++j)
    freq[j] = static_cast<double>(hits[j]) / static_cast<double>(reps);
  write_text_file(out_path(out, "pairs_selected.csv"),
                  pairs_selected_csv(cmp.items, g.edges, freq));
  return 0;
}

int run_diagnose(const std::string& data, const std::string& theta_hat_file,
                 DKind d_kind, std::uint64_t seed, const std::string& out) {
  const Matrix x = read_matrix_csv(data);
  const Matrix theta_hat = read_matrix_csv(theta_hat_file);
  const Index n = x.rows();
  const Index p = x.cols();
  if (theta_hat.rows() != p || theta_hat.cols() != p)
    throw DimensionMismatch("theta-hat is " + std::to_string(theta_hat.rows()) +
                            "x" + std::to_string(theta_hat.cols()) +
                            " but the data has p=" + std::to_string(p));

  // Reference precision: inverse ridged sample covariance of the same data.
  const Matrix theta_star = estimate_precision(x);
  const Matrix sigma_hat = x.transpose() * x / static_cast<double>(n);
  const TransformMatrix d = make_D(d_kind, p);

  const GaussianSplitParams params =
      build_params(sigma_hat, d, std::nullopt, SMode::MaxEqui);
  Rng rng(seed);
  LiftedDesign lifted = lift_observed(params, x, rng);

  const Vector kl = kl_hat(lifted, d, theta_star, theta_hat);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma_hat);
  const double lambda_x = eig.eigenvalues().maxCoeff();
  const Matrix delta_m = theta_star - theta_hat;
  const double delta_norm = delta_m.operatorNorm();

  Vector bound(d.rows());
  for (Index j = 0; j < d.rows(); ++j)
    bound[j] = kl_bound(delta_theta(params.alpha, d.d.row(j).norm(), delta_norm,
                                    p, lambda_x),
                        n, std::max<Index>(d.rows(), 2));
  write_text_file(out_path(out, "kl_report.csv"), kl_report_csv(kl, bound));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-X split knockoffs: FDR-controlled selection of sparse "
               "linear transformations"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = ".";
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--threads", threads,
                 "worker threads (0: SPLITKNOCK_THREADS or 1)");
  app.add_option("--out", out, "output directory")->capture_default_str();

  // simulate-gaussian
  GaussianSimConfig gcfg;
  gcfg.with_baseline = false;
  bool g_svg = true, g_baseline = false;
  std::string g_dkind = "D1";
  auto* sg = app.add_subcommand("simulate-gaussian",
                                "Gaussian logistic FDR/power experiment");
  sg->add_option("--p", gcfg.p)->capture_default_str();
  sg->add_option("--k", gcfg.k)->capture_default_str();
  sg->add_option("--amp", gcfg.amp)->capture_default_str();
  sg->add_option("--c", gcfg.c)->capture_default_str();
  sg->add_option("--n-list", gcfg.n_list)->delimiter(',')->capture_default_str();
  sg->add_option("--q", gcfg.q)->capture_default_str();
  sg->add_option("--reps", gcfg.reps)->capture_default_str();
  sg->add_option("--d-kind", g_dkind, "D1 | D2 | D3")
      ->check(CLI::IsMember({"D1", "D2", "D3"}))
      ->capture_default_str();
  std::string g_smode = "max-equi";
  sg->add_option("--s-mode", g_smode, "knockoff gap rule")
      ->check(CLI::IsMember({"max-equi", "independent"}))
      ->capture_default_str();
  sg->add_option("--folds", gcfg.folds)->capture_default_str();
  std::string g_cv_rule = "1se";
  sg->add_option("--cv-rule", g_cv_rule, "CV selection rule")
      ->check(CLI::IsMember({"1se", "min"}))
      ->capture_default_str();
  sg->add_flag("--fast", gcfg.fast, "fixed mid-grid (lambda, nu), no CV");
  sg->add_flag("--baseline", g_baseline, "also run vanilla MX (D1 only)");
  sg->add_flag("--svg,!--no-svg", g_svg, "emit fdr_power.svg");

  // simulate-pairwise
  PairwiseSimConfig pcfg;
  bool p_svg = true;
  std::string p_construction = "bootstrap+";
  auto* sp = app.add_subcommand("simulate-pairwise",
                                "Bradley-Terry comparison experiment");
  sp->add_option("--p", pcfg.p)->capture_default_str();
  sp->add_option("--sparsity", pcfg.sparsity)->capture_default_str();
  sp->add_option("--n-list", pcfg.n_list)->delimiter(',')->capture_default_str();
  sp->add_option("--q", pcfg.q)->capture_default_str();
  sp->add_option("--reps", pcfg.reps)->capture_default_str();
  sp->add_option("--construction", p_construction, "bootstrap+ | sequential")
      ->check(CLI::IsMember({"bootstrap+", "sequential"}))
      ->capture_default_str();
  sp->add_option("--folds", pcfg.folds)->capture_default_str();
  std::string p_cv_rule = "1se";
  sp->add_option("--cv-rule", p_cv_rule, "CV selection rule")
      ->check(CLI::IsMember({"1se", "min"}))
      ->capture_default_str();
  sp->add_flag("--fast", pcfg.fast, "fixed mid-grid (lambda, nu), no CV");
  sp->add_flag("--svg,!--no-svg", p_svg, "emit the SVG plot");

  // select-pairwise
  std::string sel_data;
  double sel_q = 0.2;
  int sel_reps = 20;
  bool sel_cv = false;
  auto* se = app.add_subcommand("select-pairwise",
                                "bootstrap+ selection on a comparisons CSV");
  se->add_option("--data", sel_data, "comparisons CSV (item_i,item_j,winner)")
      ->required()
      ->check(CLI::ExistingFile);
  se->add_option("--q", sel_q)->capture_default_str();
  se->add_option("--reps", sel_reps, "independent knockoff draws")
      ->capture_default_str();
  se->add_flag("--cv", sel_cv, "cross-validate (lambda, nu) per draw");

  // diagnose
  std::string diag_data, diag_theta;
  double diag_q = 0.2;
  std::string diag_dkind = "D1";
  auto* di = app.add_subcommand("diagnose",
                                "per-coordinate KL divergence report");
  di->add_option("--data", diag_data, "numeric CSV of X rows")
      ->required()
      ->check(CLI::ExistingFile);
  di->add_option("--theta-hat", diag_theta, "numeric CSV, p x p precision")
      ->required()
      ->check(CLI::ExistingFile);
  di->add_option("--q", diag_q)->capture_default_str();
  di->add_option("--d-kind", diag_dkind, "D1 | D2 | D3")
      ->check(CLI::IsMember({"D1", "D2", "D3"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto dkind = [](const std::string& s) {
    return s == "D1" ? DKind::D1 : s == "D2" ? DKind::D2 : DKind::D3;
  };

  try {
    if (sg->parsed()) {
      check_q(gcfg.q);
      gcfg.seed = seed;
      gcfg.threads = threads;
      gcfg.d_kind = dkind(g_dkind);
      gcfg.s_mode =
          g_smode == "independent" ? SMode::Independent : SMode::MaxEqui;
      gcfg.cv_one_se = g_cv_rule == "1se";
      gcfg.with_baseline = g_baseline;
      return run_simulate_gaussian(gcfg, out, g_svg);
    }
    if (sp->parsed()) {
      check_q(pcfg.q);
      pcfg.seed = seed;
      pcfg.threads = threads;
      pcfg.construction = p_construction == "sequential"
                              ? PairwiseConstruction::Sequential
                              : PairwiseConstruction::BootstrapPlus;
      pcfg.cv_one_se = p_cv_rule == "1se";
      return run_simulate_pairwise(pcfg, out, p_svg);
    }
    if (se->parsed()) {
      check_q(sel_q);
      return run_select_pairwise(sel_data, sel_q, sel_reps, seed, threads,
                                 sel_cv, out);
    }
    check_q(diag_q);
    return run_diagnose(diag_data, diag_theta, dkind(diag_dkind), seed, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
