#include "fbpinn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fbpinn/block_matrix.hpp"

namespace fbpinn {

namespace {

// Shortest round-trippable decimal form, stable across runs.
std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

double relative_l2_error(std::span<const double> pred, std::span<const double> exact) {
  if (pred.size() != exact.size())
    throw std::invalid_argument("relative_l2_error: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - exact[i];
    num += d * d;
    den += exact[i] * exact[i];
  }
  if (den == 0.0) throw std::invalid_argument("relative_l2_error: exact values are all zero");
  return std::sqrt(num) / std::sqrt(den);
}

void write_param_vector(const std::string& path, std::span<const double> params) {
  auto out = open_out(path);
  for (double v : params) out << g17(v) << '\n';
}

std::vector<double> read_param_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<double> params;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) params.push_back(std::stod(line));
  return params;
}

std::unique_ptr<FieldModel> build_model_seeded(const RunConfig& cfg, const Problem& problem,
                                               std::uint64_t seed) {
  const InitKind init =
      cfg.init == "glorot" ? InitKind::GlorotUniform : InitKind::UniformWeightsZeroBias;
  if (cfg.model_type == "vanilla")
    return std::make_unique<VanillaPinnModel>(cfg.dim(), problem.constraint, cfg.layers, init,
                                              seed);
  if (cfg.dim() == 1)
    return std::make_unique<FbpinnModel>(Decomposition1D(cfg.kx, cfg.deltax),
                                         problem.constraint, cfg.layers, init, seed);
  return std::make_unique<FbpinnModel>(
      Decomposition2D(cfg.kx, cfg.ky, cfg.deltax, cfg.deltay), problem.constraint, cfg.layers,
      init, seed);
}

std::unique_ptr<FieldModel> build_model(const RunConfig& cfg, const Problem& problem) {
  return build_model_seeded(cfg, problem, cfg.seed);
}

namespace {

OptimizerSettings optimizer_settings(const RunConfig& cfg) {
  OptimizerSettings s;
  if (cfg.method == "adam") {
    s.method = OptimizerSettings::Method::Adam;
    s.adam_lr = cfg.adam_lr;
  } else {
    s.method = OptimizerSettings::Method::GaussNewton;
    s.gn.mu = cfg.mu;
    s.gn.eta = cfg.eta;
    s.gn.solver =
        cfg.solver == "dense_cholesky" ? GnSolver::DenseCholesky : GnSolver::BlockCG;
    s.gn.cg_tol = cfg.cg_tol;
    s.gn.cg_max_iter = cfg.cg_max_iter;
  }
  return s;
}

CollocationSet training_grid(const RunConfig& cfg) {
  return collocation_uniform(cfg.dim(), {cfg.colloc_nx, cfg.colloc_ny});
}

CollocationSet test_grid(const RunConfig& cfg) {
  return collocation_uniform(cfg.dim(), {cfg.test_nx, cfg.test_ny});
}

void write_history(const std::filesystem::path& dir, const TrainTrace& trace,
                   std::vector<std::string>& files) {
  {
    auto out = open_out(dir / "history.csv");
    out << "iter,loss,grad_norm,step_norm,cg_iters\n";
    for (const auto& r : trace.history)
      out << r.iter << ',' << g17(r.loss) << ',' << g17(r.grad_norm) << ','
          << g17(r.step_norm) << ',' << r.cg_iters << '\n';
    files.push_back("history.csv");
  }
  {
    // wall times vary run to run, so they live apart from the history
    auto out = open_out(dir / "timing.csv");
    out << "iter,time_s\n";
    for (const auto& r : trace.history) out << r.iter << ',' << g17(r.time_s) << '\n';
    files.push_back("timing.csv");
  }
}

void write_solution(const std::filesystem::path& dir, const RunConfig& cfg,
                    const CollocationSet& grid, std::span<const double> pred,
                    std::span<const double> exact, std::vector<std::string>& files) {
  auto out = open_out(dir / "solution.csv");
  out << (cfg.dim() == 1 ? "x,u_pred,u_exact,abs_err\n" : "x,y,u_pred,u_exact,abs_err\n");
  for (int i = 0; i < grid.size(); ++i) {
    const double* x = grid.point(i);
    out << g17(x[0]);
    if (cfg.dim() == 2) out << ',' << g17(x[1]);
    out << ',' << g17(pred[i]) << ',' << g17(exact[i]) << ','
        << g17(std::abs(pred[i] - exact[i])) << '\n';
  }
  files.push_back("solution.csv");
}

void write_report(const std::filesystem::path& dir, const RunReport& report) {
  auto out = open_out(dir / "report.txt");
  out << "final_loss = " << g17(report.final_loss) << "\n";
  out << "rel_l2_error = " << g17(report.rel_l2) << "\n";
  out << "iterations = " << report.iterations << "\n";
  out << "updates = " << report.updates << "\n";
  out << "hit_tol = " << (report.hit_tol ? "true" : "false") << "\n";
  out << "wall_time_s = " << g17(report.wall_time_s) << "\n";
  out << "files =";
  for (const auto& f : report.files) out << ' ' << f;
  out << "\n";
}

}  // namespace

RunReport run_experiment(const RunConfig& cfg) {
  cfg.validate();
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  const auto t0 = std::chrono::steady_clock::now();
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);

  const Problem problem = make_problem(cfg.problem, cfg.kappa);
  const CollocationSet colloc = training_grid(cfg);
  auto model = build_model(cfg, problem);

  RunReport report;
  report.trace = run_optimizer(*model, problem, colloc, optimizer_settings(cfg),
                               StopRule{cfg.max_iters, cfg.loss_tol});
  report.final_loss = report.trace.final_loss();
  report.iterations = static_cast<int>(report.trace.history.size());
  report.updates = report.trace.updates;
  report.hit_tol = report.trace.hit_tol;

  const CollocationSet grid = test_grid(cfg);
  std::vector<double> pred(grid.size()), exact(grid.size());
  EvalWorkspace ws;
  for (int i = 0; i < grid.size(); ++i) {
    pred[i] = model->field_value(grid.point(i), ws);
    exact[i] = problem.exact(grid.point(i));
  }
  report.rel_l2 = relative_l2_error(pred, exact);

  {
    auto out = open_out(dir / "config.ini");
    out << cfg.to_ini();
    report.files.push_back("config.ini");
  }
  // final parameters; with the config they regenerate every field output
  // without retraining
  write_param_vector((dir / "params.txt").string(), model->params());
  report.files.push_back("params.txt");
  write_history(dir, report.trace, report.files);
  write_solution(dir, cfg, grid, pred, exact, report.files);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_report(dir, report);
  report.files.push_back("report.txt");
  return report;
}

void export_gram_pattern(const FieldModel& model, const Problem& problem,
                         const CollocationSet& colloc, const std::string& path) {
  std::vector<ResidualRow> rows;
  std::vector<EvalWorkspace> pool;
  residual_rows(model, problem, colloc, rows, pool);
  const BlockSymMatrix gram =
      assemble_gram(rows, model.block_sizes(), model.block_adjacency());
  const std::vector<double> dense = gram.densify();
  const int n = gram.dim();

  auto out = open_out(path);
  out << "# gram sparsity pattern\n";
  out << "# dim " << n << "\n";
  out << "# blocks " << gram.n_blocks() << "\n";
  for (int k = 0; k < gram.n_blocks(); ++k)
    out << "# block " << k << ' ' << gram.block_offset(k) << ' ' << gram.block_size(k)
        << '\n';
  for (const auto& [k, l] : gram.stored_pairs()) out << "# block_pair " << k << ' ' << l << '\n';
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(dense[static_cast<std::size_t>(i) * n + j]) > 1e-14)
        out << i << ' ' << j << '\n';
}

void write_subdomain_table(const Decomposition1D& dec, const std::string& path) {
  auto out = open_out(path);
  out << "# k a_k b_k\n";
  for (int k = 0; k < dec.K; ++k)
    out << k << ' ' << g17(dec.a(k)) << ' ' << g17(dec.b(k)) << '\n';
}

SweepResult run_sweep(const RunConfig& cfg, int n_seeds) {
  if (n_seeds < 1) throw std::invalid_argument("run_sweep: need at least one seed");
  SweepResult sweep;
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);

  for (int i = 0; i < n_seeds; ++i) {
    RunConfig run = cfg;
    run.seed = cfg.seed + static_cast<std::uint64_t>(i);
    run.out_dir = (dir / ("seed_" + std::to_string(run.seed))).string();
    sweep.seeds.push_back(run.seed);
    sweep.reports.push_back(run_experiment(run));
  }

  std::vector<double> errors;
  for (const auto& r : sweep.reports) errors.push_back(r.rel_l2);
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  sweep.median_rel_l2 =
      n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  sweep.best_rel_l2 = sorted.front();

  auto out = open_out(dir / "sweep.csv");
  out << "seed,final_loss,rel_l2,iterations,updates,hit_tol\n";
  for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
    const auto& r = sweep.reports[i];
    out << sweep.seeds[i] << ',' << g17(r.final_loss) << ',' << g17(r.rel_l2) << ','
        << r.iterations << ',' << r.updates << ',' << (r.hit_tol ? "true" : "false") << '\n';
  }
  return sweep;
}

}  // namespace fbpinn
