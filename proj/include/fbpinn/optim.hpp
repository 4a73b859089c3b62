#pragma once

#include <span>
#include <vector>

#include "fbpinn/block_matrix.hpp"
#include "fbpinn/model.hpp"
#include "fbpinn/problem.hpp"

namespace fbpinn {

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState(int n, double learning_rate)
      : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

// Standard bias-corrected Adam update; returns the l2 norm of the step.
double adam_step(AdamState& state, std::span<double> params, std::span<const double> grad);

enum class GnSolver { DenseCholesky, BlockCG };

struct GnConfig {
  double mu = 1.0;     // Tikhonov shift on the Gram matrix
  double eta = 1e-2;   // constant step size
  GnSolver solver = GnSolver::BlockCG;
  double cg_tol = 1e-10;  // relative residual
  int cg_max_iter = 0;    // 0: system dimension
};

// (G + mu I) out = rhs by dense Cholesky factorization.
void solve_dense_cholesky(const BlockSymMatrix& gram, double mu,
                          std::span<const double> rhs, std::span<double> out);

// Same system by conjugate gradients on the block-sparse matvec with
// block-Jacobi preconditioning (Cholesky factors of G_kk + mu I). Returns
// the iteration count; on non-convergence the best iterate is kept and
// *converged is false.
int solve_block_cg(const BlockSymMatrix& gram, double mu, std::span<const double> rhs,
                   std::span<double> out, double tol, int max_iter, bool* converged);

struct StepDiagnostics {
  double loss = 0.0;
  double grad_norm = 0.0;
  double step_norm = 0.0;
  int cg_iters = 0;
  bool cg_converged = true;
};

// One regularized Gauss-Newton update: solve (G + mu I) d = grad(L) and
// move params by -eta d. Diagnostics describe the state before the update.
StepDiagnostics gn_step(FieldModel& model, const Problem& problem,
                        const CollocationSet& colloc, const GnConfig& cfg);

struct OptimizerSettings {
  enum class Method { Adam, GaussNewton };
  Method method = Method::GaussNewton;
  double adam_lr = 1e-3;
  GnConfig gn;
};

struct StopRule {
  int max_iters = 1000;
  double loss_tol = 0.0;  // stop when loss drops below; 0 disables
};

struct IterRecord {
  int iter = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double step_norm = 0.0;  // of the update taken from this state; 0 on the final record
  int cg_iters = 0;
  double time_s = 0.0;     // wall clock since training start
};

struct TrainTrace {
  std::vector<IterRecord> history;  // one record per loss evaluation
  int updates = 0;
  bool hit_tol = false;
  double final_loss() const { return history.back().loss; }
};

// Full-batch training loop. Each iteration evaluates loss and gradient at
// the current parameters, records them, stops if the loss tolerance or the
// update budget is exhausted, and otherwise applies one optimizer update.
// A non-finite loss aborts with a diagnostic.
TrainTrace run_optimizer(FieldModel& model, const Problem& problem,
                         const CollocationSet& colloc, const OptimizerSettings& settings,
                         const StopRule& stop);

}  // namespace fbpinn
