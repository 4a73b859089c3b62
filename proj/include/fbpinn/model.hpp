#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "fbpinn/decomp.hpp"
#include "fbpinn/jet.hpp"
#include "fbpinn/mlp.hpp"
#include "fbpinn/problem.hpp"

namespace fbpinn {

// One collocation point's residual value together with its parameter
// gradient, stored block-sparse: only the covering subdomains' parameter
// segments appear.
struct ResidualRow {
  std::array<double, 2> x{};
  double value = 0.0;

  struct Seg {
    int block = 0;
    int offset = 0;  // global parameter offset of the block
    std::vector<double> g;
  };
  std::vector<Seg> segs;
};

// Reusable scratch space for field and residual evaluation.
struct EvalWorkspace {
  MlpWorkspace mlp;
  std::vector<int> covering;
  std::vector<Jet2> input;
  std::vector<Jet2> tangents;  // n_axes * covering * subnet params, axis-major
  std::vector<Jet2> cw;        // constraint*window jets per (axis, covering slot)
};

// A trainable field on [-1,1]^dim whose parameters are grouped in blocks;
// residual rows only touch the blocks covering the evaluation point.
class FieldModel {
 public:
  virtual ~FieldModel() = default;

  virtual int dim() const = 0;
  virtual int n_params() const = 0;
  virtual int n_blocks() const = 0;
  virtual int block_offset(int k) const = 0;
  virtual int block_size(int k) const = 0;
  virtual const ConstraintOp& constraint() const = 0;

  virtual std::span<double> params() = 0;
  virtual std::span<const double> params() const = 0;

  virtual void covering_blocks(const double* x, std::vector<int>& out) const = 0;
  virtual std::vector<std::pair<int, int>> block_adjacency() const = 0;

  // Constrained field as a jet along the given axis.
  virtual Jet2 field_eval(const double* x, int axis, EvalWorkspace& ws) const = 0;

  // Residual value and block-sparse parameter gradient at one point.
  virtual void residual_row(const Problem& problem, const double* x, ResidualRow& row,
                            EvalWorkspace& ws) const = 0;

  double field_value(const double* x, EvalWorkspace& ws) const {
    return field_eval(x, 0, ws).val;
  }

  std::vector<int> block_sizes() const {
    std::vector<int> s(n_blocks());
    for (int k = 0; k < n_blocks(); ++k) s[k] = block_size(k);
    return s;
  }
};

// Sum of windowed subdomain networks composed with the constraint:
// c(x) * sum_k omega_k(x) * net_k(normalize_k(x)). All subnets share one
// architecture; the global parameter vector concatenates them in
// subdomain order.
class FbpinnModel : public FieldModel {
 public:
  FbpinnModel(Decomposition1D dec, ConstraintOp constraint,
              std::vector<int> subnet_layers, InitKind init, std::uint64_t master_seed);
  FbpinnModel(Decomposition2D dec, ConstraintOp constraint,
              std::vector<int> subnet_layers, InitKind init, std::uint64_t master_seed);

  int dim() const override { return dim_; }
  int n_params() const override { return static_cast<int>(params_.size()); }
  int n_blocks() const override { return n_subnets_; }
  int block_offset(int k) const override { return k * shape_.n_params; }
  int block_size(int) const override { return shape_.n_params; }
  const ConstraintOp& constraint() const override { return constraint_; }

  std::span<double> params() override { return params_; }
  std::span<const double> params() const override { return params_; }

  void covering_blocks(const double* x, std::vector<int>& out) const override;
  std::vector<std::pair<int, int>> block_adjacency() const override;

  Jet2 field_eval(const double* x, int axis, EvalWorkspace& ws) const override;
  void residual_row(const Problem& problem, const double* x, ResidualRow& row,
                    EvalWorkspace& ws) const override;

  const MlpShape& subnet_shape() const { return shape_; }
  const Decomposition1D& decomposition_x() const { return dx_; }
  const Decomposition1D& decomposition_y() const { return dy_; }

 private:
  void init_params(InitKind init, std::uint64_t master_seed);
  Jet2 window_jet(int k, const Jet2* pj) const;
  void subnet_inputs(int k, const Jet2* pj, Jet2* in) const;

  int dim_ = 1;
  Decomposition1D dx_;
  Decomposition1D dy_;
  ConstraintOp constraint_;
  MlpShape shape_;
  int n_subnets_ = 1;
  std::vector<double> params_;
};

// Single dense network times the constraint; every residual row is dense.
class VanillaPinnModel : public FieldModel {
 public:
  VanillaPinnModel(int dim, ConstraintOp constraint, std::vector<int> layers,
                   InitKind init, std::uint64_t master_seed);

  int dim() const override { return dim_; }
  int n_params() const override { return static_cast<int>(params_.size()); }
  int n_blocks() const override { return 1; }
  int block_offset(int) const override { return 0; }
  int block_size(int) const override { return shape_.n_params; }
  const ConstraintOp& constraint() const override { return constraint_; }

  std::span<double> params() override { return params_; }
  std::span<const double> params() const override { return params_; }

  void covering_blocks(const double*, std::vector<int>& out) const override {
    out.assign(1, 0);
  }
  std::vector<std::pair<int, int>> block_adjacency() const override { return {{0, 0}}; }

  Jet2 field_eval(const double* x, int axis, EvalWorkspace& ws) const override;
  void residual_row(const Problem& problem, const double* x, ResidualRow& row,
                    EvalWorkspace& ws) const override;

 private:
  int dim_ = 1;
  ConstraintOp constraint_;
  MlpShape shape_;
  std::vector<double> params_;
};

// Residual rows over a collocation set, evaluated in fixed chunks (results
// independent of threading). `rows` is resized to the set and reused.
void residual_rows(const FieldModel& model, const Problem& problem,
                   const CollocationSet& colloc, std::vector<ResidualRow>& rows,
                   std::vector<EvalWorkspace>& pool);

double loss_from_rows(const std::vector<ResidualRow>& rows);

// grad = (2/N) sum_i r_i * grad_i, scattered into the dense global vector.
void grad_from_rows(const std::vector<ResidualRow>& rows, std::span<double> grad);

double loss(const FieldModel& model, const Problem& problem, const CollocationSet& colloc);
std::vector<double> loss_gradient(const FieldModel& model, const Problem& problem,
                                  const CollocationSet& colloc);

}  // namespace fbpinn
