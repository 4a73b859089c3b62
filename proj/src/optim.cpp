#include "fbpinn/optim.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fbpinn {

double adam_step(AdamState& state, std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: size mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  double sq = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    const double d = state.lr * mhat / (std::sqrt(vhat) + state.eps);
    params[i] -= d;
    sq += d * d;
  }
  return std::sqrt(sq);
}

void solve_dense_cholesky(const BlockSymMatrix& gram, double mu,
                          std::span<const double> rhs, std::span<double> out) {
  const int n = gram.dim();
  std::vector<double> dense = gram.densify();
  Eigen::Map<Eigen::MatrixXd> a(dense.data(), n, n);  // symmetric, order irrelevant
  a.diagonal().array() += mu;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("solve_dense_cholesky: factorization failed");
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
  Eigen::Map<Eigen::VectorXd> x(out.data(), n);
  x = llt.solve(b);
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Block-diagonal preconditioner from Cholesky factors of G_kk + mu I.
class BlockJacobi {
 public:
  BlockJacobi(const BlockSymMatrix& gram, double mu) {
    const int nb = gram.n_blocks();
    factors_.reserve(nb);
    for (int k = 0; k < nb; ++k) {
      const int nk = gram.block_size(k);
      Eigen::MatrixXd a(nk, nk);
      const auto blk = gram.block(k, k);
      for (int i = 0; i < nk; ++i)
        for (int j = 0; j < nk; ++j) a(i, j) = blk[static_cast<std::size_t>(i) * nk + j];
      a.diagonal().array() += mu;
      factors_.emplace_back(a.llt());
      if (factors_.back().info() != Eigen::Success)
        throw std::runtime_error("block_cg: preconditioner factorization failed");
      offsets_.push_back(gram.block_offset(k));
      sizes_.push_back(nk);
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      Eigen::Map<const Eigen::VectorXd> rk(r.data() + offsets_[k], sizes_[k]);
      Eigen::Map<Eigen::VectorXd> zk(z.data() + offsets_[k], sizes_[k]);
      zk = factors_[k].solve(rk);
    }
  }

 private:
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  std::vector<int> offsets_;
  std::vector<int> sizes_;
};

}  // namespace

int solve_block_cg(const BlockSymMatrix& gram, double mu, std::span<const double> rhs,
                   std::span<double> out, double tol, int max_iter, bool* converged) {
  const int n = gram.dim();
  if (max_iter <= 0) max_iter = n;
  std::fill(out.begin(), out.end(), 0.0);

  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  if (converged) *converged = true;
  if (rhs_norm == 0.0) return 0;

  BlockJacobi precond(gram, mu);
  std::vector<double> r(rhs.begin(), rhs.end());
  std::vector<double> z(n), p(n), q(n), best(n, 0.0);

  precond.apply(r, z);
  p = z;
  double rho = dot(r, z);
  double res_norm = rhs_norm;
  double best_norm = res_norm;
  const double target = tol * rhs_norm;

  int it = 0;
  while (it < max_iter && res_norm > target) {
    gram.matvec(p, q, mu);
    const double alpha = rho / dot(p, q);
    for (int i = 0; i < n; ++i) {
      out[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    ++it;
    res_norm = std::sqrt(dot(r, r));
    if (res_norm < best_norm) {
      best_norm = res_norm;
      std::copy(out.begin(), out.end(), best.begin());
    }
    if (res_norm <= target) break;
    precond.apply(r, z);
    const double rho_next = dot(r, z);
    const double beta = rho_next / rho;
    rho = rho_next;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  if (res_norm > target) {
    std::copy(best.begin(), best.end(), out.begin());
    if (converged) *converged = false;
  }
  return it;
}

namespace {

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

// Shared buffers for repeated Gauss-Newton updates.
struct GnBuffers {
  std::vector<ResidualRow> rows;
  std::vector<EvalWorkspace> pool;
  std::vector<double> grad, dir;
  GramAccumulator gram;

  GnBuffers(const FieldModel& model)
      : grad(model.n_params()), dir(model.n_params()),
        gram(model.block_sizes(), model.block_adjacency()) {}
};

StepDiagnostics gn_eval(FieldModel& model, const Problem& problem,
                        const CollocationSet& colloc, GnBuffers& buf) {
  StepDiagnostics diag;
  residual_rows(model, problem, colloc, buf.rows, buf.pool);
  diag.loss = loss_from_rows(buf.rows);
  grad_from_rows(buf.rows, buf.grad);
  diag.grad_norm = norm2(buf.grad);
  return diag;
}

void gn_update(FieldModel& model, const CollocationSet& colloc, const GnConfig& cfg,
               GnBuffers& buf, StepDiagnostics& diag) {
  const double row_scale = 1.0 / static_cast<double>(colloc.size());
  const BlockSymMatrix& gram = buf.gram.accumulate(buf.rows, row_scale);
  if (cfg.solver == GnSolver::DenseCholesky) {
    solve_dense_cholesky(gram, cfg.mu, buf.grad, buf.dir);
  } else {
    bool ok = true;
    diag.cg_iters = solve_block_cg(gram, cfg.mu, buf.grad, buf.dir, cfg.cg_tol,
                                   cfg.cg_max_iter, &ok);
    diag.cg_converged = ok;
  }
  auto params = model.params();
  double sq = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double d = cfg.eta * buf.dir[i];
    params[i] -= d;
    sq += d * d;
  }
  diag.step_norm = std::sqrt(sq);
}

}  // namespace

StepDiagnostics gn_step(FieldModel& model, const Problem& problem,
                        const CollocationSet& colloc, const GnConfig& cfg) {
  GnBuffers buf(model);
  StepDiagnostics diag = gn_eval(model, problem, colloc, buf);
  gn_update(model, colloc, cfg, buf, diag);
  return diag;
}

TrainTrace run_optimizer(FieldModel& model, const Problem& problem,
                         const CollocationSet& colloc, const OptimizerSettings& settings,
                         const StopRule& stop) {
  if (colloc.size() < 1) throw std::invalid_argument("run_optimizer: empty collocation set");
  if (stop.max_iters < 0) throw std::invalid_argument("run_optimizer: negative iteration budget");

  TrainTrace trace;
  trace.history.reserve(stop.max_iters + 1);
  GnBuffers buf(model);
  AdamState adam(model.n_params(), settings.adam_lr);
  const auto t0 = std::chrono::steady_clock::now();

  for (int it = 0;; ++it) {
    StepDiagnostics diag = gn_eval(model, problem, colloc, buf);
    if (!std::isfinite(diag.loss))
      throw std::runtime_error("run_optimizer: non-finite loss at iteration " + std::to_string(it));

    IterRecord rec;
    rec.iter = it;
    rec.loss = diag.loss;
    rec.grad_norm = diag.grad_norm;
    trace.history.push_back(rec);

    if (stop.loss_tol > 0.0 && diag.loss < stop.loss_tol) {
      trace.hit_tol = true;
      break;
    }
    if (it >= stop.max_iters) break;

    if (settings.method == OptimizerSettings::Method::GaussNewton) {
      gn_update(model, colloc, settings.gn, buf, diag);
    } else {
      diag.step_norm = adam_step(adam, model.params(), buf.grad);
    }
    trace.updates += 1;

    auto& rec_out = trace.history.back();
    rec_out.step_norm = diag.step_norm;
    rec_out.cg_iters = diag.cg_iters;
    rec_out.time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  auto& last = trace.history.back();
  last.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

}  // namespace fbpinn
