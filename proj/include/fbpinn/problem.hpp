#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "fbpinn/decomp.hpp"
#include "fbpinn/jet.hpp"

namespace fbpinn {

// A boundary value problem on [-1,1]^dim posed for the constrained field.
// The residual splits as r(x) = linear_op(x, field jets) + source(x) with
// linear_op linear in the field, so the same operator applied to
// parameter-tangent jets yields the residual's parameter derivatives.
// field[axis] is the constrained field evaluated with the spatial jet
// seeded along that axis; all entries share the same value component.
struct Problem {
  std::string name;
  int dim = 1;
  ConstraintOp constraint;

  std::function<double(const double* x, const Jet2* field)> linear_op;
  std::function<double(const double* x)> source;
  std::function<double(const double* x)> exact;
  std::function<Jet2(const double* x, int axis)> exact_jet;

  double residual(const double* x, const Jet2* field) const {
    return linear_op(x, field) + source(x);
  }
};

// du/dx = 16*pi*cos(16*pi*x) on [-1,1] with u(0) = 0; the exact solution
// is sin(16*pi*x). kappa scales the tanh constraint enforcing u(0) = 0.
Problem ode_problem(double kappa = 16.0);

// Laplacian(u) + u = f on [-1,1]^2 with homogeneous Dirichlet data, where
// f = -4 + 2(x^2+y^2) + (1-x^2)(1-y^2); the exact solution is the bubble
// (1-x^2)(1-y^2).
Problem helmholtz_problem();

Problem make_problem(const std::string& name, double kappa);

// Deterministic equispaced collocation grid, endpoints included; 2D grids
// are stored lexicographically by (x, y).
struct CollocationSet {
  int dim = 1;
  std::vector<double> pts;  // dim doubles per point

  int size() const { return static_cast<int>(pts.size()) / dim; }
  const double* point(int i) const { return pts.data() + static_cast<std::size_t>(i) * dim; }
};

CollocationSet collocation_uniform(int dim, std::array<int, 2> counts);

}  // namespace fbpinn
