#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fbpinn/config.hpp"
#include "fbpinn/model.hpp"
#include "fbpinn/optim.hpp"
#include "fbpinn/problem.hpp"

namespace fbpinn {

// ||pred - exact||_2 / ||exact||_2 over matching sample vectors.
double relative_l2_error(std::span<const double> pred, std::span<const double> exact);

// Flat text serialization of a parameter vector, one value per line in
// round-trippable decimal form.
void write_param_vector(const std::string& path, std::span<const double> params);
std::vector<double> read_param_vector(const std::string& path);

struct RunReport {
  double final_loss = 0.0;
  double rel_l2 = 0.0;
  int iterations = 0;  // loss-history rows (updates + 1)
  int updates = 0;
  bool hit_tol = false;
  double wall_time_s = 0.0;
  std::vector<std::string> files;
  TrainTrace trace;
};

std::unique_ptr<FieldModel> build_model(const RunConfig& cfg, const Problem& problem);
std::unique_ptr<FieldModel> build_model_seeded(const RunConfig& cfg, const Problem& problem,
                                               std::uint64_t seed);

// Runs one experiment end to end: build, train, evaluate on the test grid
// and write history.csv, timing.csv, solution.csv, report.txt and the
// echoed config into cfg.out_dir.
RunReport run_experiment(const RunConfig& cfg);

// Writes the block adjacency and the boolean nonzero mask of the densified
// Gram matrix (|G_ij| > 1e-14) at the model's current parameters, in a
// plain-text coordinate format.
void export_gram_pattern(const FieldModel& model, const Problem& problem,
                         const CollocationSet& colloc, const std::string& path);

// (k, a_k, b_k) rows for plotting the subdomain layout.
void write_subdomain_table(const Decomposition1D& dec, const std::string& path);

struct SweepResult {
  std::vector<std::uint64_t> seeds;
  std::vector<RunReport> reports;
  double median_rel_l2 = 0.0;
  double best_rel_l2 = 0.0;
};

// Runs cfg once per seed (cfg.seed + i), writing each run under
// out_dir/seed_<s>/ plus a sweep.csv summary.
SweepResult run_sweep(const RunConfig& cfg, int n_seeds);

}  // namespace fbpinn
