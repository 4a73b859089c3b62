#include "fbpinn/model.hpp"

#include <cmath>
#include <stdexcept>

#include "fbpinn/parallel.hpp"

namespace fbpinn {

FbpinnModel::FbpinnModel(Decomposition1D dec, ConstraintOp constraint,
                         std::vector<int> subnet_layers, InitKind init,
                         std::uint64_t master_seed)
    : dim_(1), dx_(dec), dy_(1, 0.5), constraint_(constraint),
      shape_(std::move(subnet_layers)), n_subnets_(dec.K) {
  if (shape_.input_dim() != 1)
    throw std::invalid_argument("FbpinnModel: subnet input dimension must match the domain");
  init_params(init, master_seed);
}

FbpinnModel::FbpinnModel(Decomposition2D dec, ConstraintOp constraint,
                         std::vector<int> subnet_layers, InitKind init,
                         std::uint64_t master_seed)
    : dim_(2), dx_(dec.x), dy_(dec.y), constraint_(constraint),
      shape_(std::move(subnet_layers)), n_subnets_(dec.n_subdomains()) {
  if (shape_.input_dim() != 2)
    throw std::invalid_argument("FbpinnModel: subnet input dimension must match the domain");
  init_params(init, master_seed);
}

void FbpinnModel::init_params(InitKind init, std::uint64_t master_seed) {
  params_.resize(static_cast<std::size_t>(n_subnets_) * shape_.n_params);
  for (int k = 0; k < n_subnets_; ++k) {
    const auto sub = mlp_init_params(shape_, InitScheme{init, subnet_seed(master_seed, k)});
    std::copy(sub.begin(), sub.end(), params_.begin() + block_offset(k));
  }
}

void FbpinnModel::covering_blocks(const double* x, std::vector<int>& out) const {
  if (dim_ == 1) {
    dx_.covering(x[0], out);
  } else {
    out.clear();
    for (int iy = 0; iy < dy_.K; ++iy) {
      if (!dy_.covers(iy, x[1])) continue;
      for (int ix = 0; ix < dx_.K; ++ix)
        if (dx_.covers(ix, x[0])) out.push_back(ix + dx_.K * iy);
    }
  }
}

std::vector<std::pair<int, int>> FbpinnModel::block_adjacency() const {
  if (dim_ == 1) return dx_.adjacency();
  return Decomposition2D{dx_.K, dy_.K, dx_.delta, dy_.delta}.adjacency();
}

Jet2 FbpinnModel::window_jet(int k, const Jet2* pj) const {
  if (dim_ == 1) return dx_.window(k, pj[0]);
  return dx_.window(k % dx_.K, pj[0]) * dy_.window(k / dx_.K, pj[1]);
}

void FbpinnModel::subnet_inputs(int k, const Jet2* pj, Jet2* in) const {
  if (dim_ == 1) {
    in[0] = dx_.normalize(k, pj[0]);
  } else {
    in[0] = dx_.normalize(k % dx_.K, pj[0]);
    in[1] = dy_.normalize(k / dx_.K, pj[1]);
  }
}

Jet2 FbpinnModel::field_eval(const double* x, int axis, EvalWorkspace& ws) const {
  covering_blocks(x, ws.covering);
  ws.input.resize(dim_);
  Jet2 pj[2];
  for (int d = 0; d < dim_; ++d)
    pj[d] = (d == axis) ? jet_var(x[d]) : jet_const(x[d]);
  const Jet2 cjet = constraint_.eval({pj, static_cast<std::size_t>(dim_)});
  const int sub_params = shape_.n_params;
  Jet2 usum{};
  for (int k : ws.covering) {
    subnet_inputs(k, pj, ws.input.data());
    const std::span<const double> theta(params_.data() + block_offset(k), sub_params);
    const Jet2 out = mlp_forward_jet(shape_, theta, {ws.input.data(), static_cast<std::size_t>(dim_)}, ws.mlp);
    usum += window_jet(k, pj) * out;
  }
  return cjet * usum;
}

namespace {

// Component coefficients of the problem's linear operator along each axis,
// recovered by probing with basis jets (the operator is linear in the
// field by contract). Folding them with the constraint*window jet gives
// the residual tangent as three multiply-adds per parameter.
struct OpFold {
  double t_val, t_d1, t_d2;
};

void probe_linear_op(const Problem& problem, const double* x, int nd, double coeff[2][3]) {
  Jet2 basis[2] = {Jet2{}, Jet2{}};
  for (int axis = 0; axis < nd; ++axis) {
    for (int comp = 0; comp < 3; ++comp) {
      double* slot = comp == 0 ? &basis[axis].val : (comp == 1 ? &basis[axis].d1 : &basis[axis].d2);
      *slot = 1.0;
      coeff[axis][comp] = problem.linear_op(x, basis);
      *slot = 0.0;
    }
  }
}

OpFold fold_op(const double c[3], const Jet2& cw) {
  return {c[0] * cw.val + c[1] * cw.d1 + c[2] * cw.d2,
          c[1] * cw.val + 2.0 * c[2] * cw.d1,
          c[2] * cw.val};
}

}  // namespace

void FbpinnModel::residual_row(const Problem& problem, const double* x, ResidualRow& row,
                               EvalWorkspace& ws) const {
  covering_blocks(x, ws.covering);
  const int nc = static_cast<int>(ws.covering.size());
  const int nd = dim_;
  const int sub_params = shape_.n_params;

  ws.input.resize(nd);
  ws.tangents.resize(static_cast<std::size_t>(nd) * nc * sub_params);
  ws.cw.resize(static_cast<std::size_t>(nd) * nc);

  Jet2 field[2];
  for (int axis = 0; axis < nd; ++axis) {
    Jet2 pj[2];
    for (int d = 0; d < nd; ++d)
      pj[d] = (d == axis) ? jet_var(x[d]) : jet_const(x[d]);
    const Jet2 cjet = constraint_.eval({pj, static_cast<std::size_t>(nd)});
    Jet2 usum{};
    for (int s = 0; s < nc; ++s) {
      const int k = ws.covering[s];
      subnet_inputs(k, pj, ws.input.data());
      const Jet2 w = window_jet(k, pj);
      const std::span<const double> theta(params_.data() + block_offset(k), sub_params);
      std::span<Jet2> tan(ws.tangents.data() + (static_cast<std::size_t>(axis) * nc + s) * sub_params,
                          sub_params);
      const Jet2 out = mlp_forward_backward(shape_, theta, {ws.input.data(), static_cast<std::size_t>(nd)},
                                            tan, ws.mlp);
      ws.cw[static_cast<std::size_t>(axis) * nc + s] = cjet * w;
      usum += w * out;
    }
    field[axis] = cjet * usum;
  }

  row.x = {x[0], nd > 1 ? x[1] : 0.0};
  row.value = problem.residual(x, field);

  double coeff[2][3];
  probe_linear_op(problem, x, nd, coeff);

  row.segs.resize(nc);
  for (int s = 0; s < nc; ++s) {
    auto& seg = row.segs[s];
    const int k = ws.covering[s];
    seg.block = k;
    seg.offset = block_offset(k);
    seg.g.resize(sub_params);
    OpFold fold[2];
    const Jet2* tan[2];
    for (int axis = 0; axis < nd; ++axis) {
      fold[axis] = fold_op(coeff[axis], ws.cw[static_cast<std::size_t>(axis) * nc + s]);
      tan[axis] = ws.tangents.data() + (static_cast<std::size_t>(axis) * nc + s) * sub_params;
    }
    for (int j = 0; j < sub_params; ++j) {
      double gj = fold[0].t_val * tan[0][j].val + fold[0].t_d1 * tan[0][j].d1 +
                  fold[0].t_d2 * tan[0][j].d2;
      if (nd == 2)
        gj += fold[1].t_val * tan[1][j].val + fold[1].t_d1 * tan[1][j].d1 +
              fold[1].t_d2 * tan[1][j].d2;
      seg.g[j] = gj;
    }
  }
}

VanillaPinnModel::VanillaPinnModel(int dim, ConstraintOp constraint, std::vector<int> layers,
                                   InitKind init, std::uint64_t master_seed)
    : dim_(dim), constraint_(constraint), shape_(std::move(layers)) {
  if (shape_.input_dim() != dim_)
    throw std::invalid_argument("VanillaPinnModel: network input dimension must match the domain");
  params_ = mlp_init_params(shape_, InitScheme{init, subnet_seed(master_seed, 0)});
}

Jet2 VanillaPinnModel::field_eval(const double* x, int axis, EvalWorkspace& ws) const {
  ws.input.resize(dim_);
  for (int d = 0; d < dim_; ++d)
    ws.input[d] = (d == axis) ? jet_var(x[d]) : jet_const(x[d]);
  const Jet2 cjet = constraint_.eval({ws.input.data(), static_cast<std::size_t>(dim_)});
  const Jet2 out = mlp_forward_jet(shape_, params_, {ws.input.data(), static_cast<std::size_t>(dim_)}, ws.mlp);
  return cjet * out;
}

void VanillaPinnModel::residual_row(const Problem& problem, const double* x, ResidualRow& row,
                                    EvalWorkspace& ws) const {
  const int nd = dim_;
  const int np = shape_.n_params;
  ws.input.resize(nd);
  ws.tangents.resize(static_cast<std::size_t>(nd) * np);
  ws.cw.resize(nd);

  Jet2 field[2];
  for (int axis = 0; axis < nd; ++axis) {
    Jet2 pj[2];
    for (int d = 0; d < nd; ++d)
      pj[d] = (d == axis) ? jet_var(x[d]) : jet_const(x[d]);
    for (int d = 0; d < nd; ++d) ws.input[d] = pj[d];
    const Jet2 cjet = constraint_.eval({pj, static_cast<std::size_t>(nd)});
    std::span<Jet2> tan(ws.tangents.data() + static_cast<std::size_t>(axis) * np, np);
    const Jet2 out = mlp_forward_backward(shape_, params_, {ws.input.data(), static_cast<std::size_t>(nd)},
                                          tan, ws.mlp);
    ws.cw[axis] = cjet;
    field[axis] = cjet * out;
  }

  row.x = {x[0], nd > 1 ? x[1] : 0.0};
  row.value = problem.residual(x, field);

  double coeff[2][3];
  probe_linear_op(problem, x, nd, coeff);

  row.segs.resize(1);
  auto& seg = row.segs[0];
  seg.block = 0;
  seg.offset = 0;
  seg.g.resize(np);
  OpFold fold[2];
  const Jet2* tan[2];
  for (int axis = 0; axis < nd; ++axis) {
    fold[axis] = fold_op(coeff[axis], ws.cw[axis]);
    tan[axis] = ws.tangents.data() + static_cast<std::size_t>(axis) * np;
  }
  for (int j = 0; j < np; ++j) {
    double gj = fold[0].t_val * tan[0][j].val + fold[0].t_d1 * tan[0][j].d1 +
                fold[0].t_d2 * tan[0][j].d2;
    if (nd == 2)
      gj += fold[1].t_val * tan[1][j].val + fold[1].t_d1 * tan[1][j].d1 +
            fold[1].t_d2 * tan[1][j].d2;
    seg.g[j] = gj;
  }
}

void residual_rows(const FieldModel& model, const Problem& problem,
                   const CollocationSet& colloc, std::vector<ResidualRow>& rows,
                   std::vector<EvalWorkspace>& pool) {
  const int n = colloc.size();
  rows.resize(n);
  pool.resize(n_chunks(n));
  parallel_chunks(n, [&](int c, int begin, int end) {
    for (int i = begin; i < end; ++i)
      model.residual_row(problem, colloc.point(i), rows[i], pool[c]);
  });
}

double loss_from_rows(const std::vector<ResidualRow>& rows) {
  double acc = 0.0;
  for (const auto& row : rows) acc += row.value * row.value;
  return acc / static_cast<double>(rows.size());
}

void grad_from_rows(const std::vector<ResidualRow>& rows, std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  const double scale = 2.0 / static_cast<double>(rows.size());
  for (const auto& row : rows) {
    const double sr = scale * row.value;
    for (const auto& seg : row.segs) {
      double* g = grad.data() + seg.offset;
      for (std::size_t j = 0; j < seg.g.size(); ++j) g[j] += sr * seg.g[j];
    }
  }
}

double loss(const FieldModel& model, const Problem& problem, const CollocationSet& colloc) {
  std::vector<ResidualRow> rows;
  std::vector<EvalWorkspace> pool;
  residual_rows(model, problem, colloc, rows, pool);
  return loss_from_rows(rows);
}

std::vector<double> loss_gradient(const FieldModel& model, const Problem& problem,
                                  const CollocationSet& colloc) {
  std::vector<ResidualRow> rows;
  std::vector<EvalWorkspace> pool;
  residual_rows(model, problem, colloc, rows, pool);
  std::vector<double> grad(model.n_params());
  grad_from_rows(rows, grad);
  return grad;
}

}  // namespace fbpinn
