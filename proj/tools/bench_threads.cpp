// Benchmarks the OpenMP replicate loop against the serial reference on a small
// Gaussian experiment and checks that both produce identical result tables.

#include <chrono>
#include <iostream>

#include "splitknock/io.hpp"
#include "splitknock/simlab.hpp"

using namespace splitknock;

namespace {

double time_run(const GaussianSimConfig& cfg, ExperimentTable& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = run_gaussian_experiment(cfg);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string strip_wall(const std::vector<ReplicateRow>& rows) {
  std::vector<ReplicateRow> copy = rows;
  for (ReplicateRow& r : copy) r.wall_ms = 0.0;
  return replicates_csv(copy);
}

}  // namespace

int main(int argc, char** argv) {
  GaussianSimConfig cfg;
  cfg.p = 12;
  cfg.k = 4;
  cfg.n_list = {300};
  cfg.reps = 16;
  cfg.fast = true;
  cfg.with_baseline = false;
  const int threads = argc > 1 ? std::atoi(argv[1]) : 4;

  ExperimentTable serial, parallel;
  cfg.threads = 1;
  const double t_serial = time_run(cfg, serial);
  cfg.threads = threads;
  const double t_parallel = time_run(cfg, parallel);

  std::cout << "serial reference: " << t_serial << " s\n"
            << "parallel (" << threads << " threads): " << t_parallel << " s\n"
            << "speedup: " << t_serial / t_parallel << "x\n";
  if (strip_wall(serial.rows) != strip_wall(parallel.rows)) {
    std::cerr << "MISMATCH: parallel results differ from the serial reference\n";
    return 1;
  }
  std::cout << "results identical to the serial reference\n";
  return 0;
}
