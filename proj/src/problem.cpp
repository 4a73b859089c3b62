#include "fbpinn/problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fbpinn {

namespace {
constexpr double kOdeFreq = 16.0 * std::numbers::pi;
}

Problem ode_problem(double kappa) {
  Problem p;
  p.name = "ode1d_hf";
  p.dim = 1;
  p.constraint = ConstraintOp{ConstraintOp::Kind::TanhScaled, kappa};
  p.linear_op = [](const double*, const Jet2* field) { return field[0].d1; };
  p.source = [](const double* x) { return -kOdeFreq * std::cos(kOdeFreq * x[0]); };
  p.exact = [](const double* x) { return std::sin(kOdeFreq * x[0]); };
  p.exact_jet = [](const double* x, int) { return sin(jet_var(x[0]) * kOdeFreq); };
  return p;
}

Problem helmholtz_problem() {
  Problem p;
  p.name = "helmholtz2d";
  p.dim = 2;
  p.constraint = ConstraintOp{ConstraintOp::Kind::ProductBubble, 0.0};
  p.linear_op = [](const double*, const Jet2* field) {
    return field[0].d2 + field[1].d2 + field[0].val;
  };
  p.source = [](const double* x) {
    const double x2 = x[0] * x[0], y2 = x[1] * x[1];
    return -(-4.0 + 2.0 * (x2 + y2) + (1.0 - x2) * (1.0 - y2));
  };
  p.exact = [](const double* x) {
    return (1.0 - x[0] * x[0]) * (1.0 - x[1] * x[1]);
  };
  p.exact_jet = [](const double* x, int axis) {
    const Jet2 xj = axis == 0 ? jet_var(x[0]) : jet_const(x[0]);
    const Jet2 yj = axis == 1 ? jet_var(x[1]) : jet_const(x[1]);
    return (1.0 - xj * xj) * (1.0 - yj * yj);
  };
  return p;
}

Problem make_problem(const std::string& name, double kappa) {
  if (name == "ode1d_hf") return ode_problem(kappa);
  if (name == "helmholtz2d") return helmholtz_problem();
  throw std::invalid_argument("unknown problem: " + name);
}

CollocationSet collocation_uniform(int dim, std::array<int, 2> counts) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("collocation: dim must be 1 or 2");
  for (int a = 0; a < dim; ++a)
    if (counts[a] < 2) throw std::invalid_argument("collocation: need at least 2 points per axis");

  auto coord = [](int i, int n) { return -1.0 + 2.0 * i / (n - 1); };
  CollocationSet set;
  set.dim = dim;
  if (dim == 1) {
    set.pts.reserve(counts[0]);
    for (int i = 0; i < counts[0]; ++i) set.pts.push_back(coord(i, counts[0]));
  } else {
    set.pts.reserve(static_cast<std::size_t>(counts[0]) * counts[1] * 2);
    for (int ix = 0; ix < counts[0]; ++ix)
      for (int iy = 0; iy < counts[1]; ++iy) {
        set.pts.push_back(coord(ix, counts[0]));
        set.pts.push_back(coord(iy, counts[1]));
      }
  }
  return set;
}

}  // namespace fbpinn
