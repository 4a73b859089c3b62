#pragma once

#include <span>
#include <utility>
#include <vector>

#include "fbpinn/jet.hpp"

namespace fbpinn {

// Overlapping cover of [-1,1] by K subintervals (a_k, b_k) carrying cosine
// (Hann-ramp) windows that form a partition of unity. The outermost
// windows are clamped: the first has no rising ramp and the last no
// falling ramp, so they sit at one from the domain boundary to their
// interior ramp and the windows sum to one on all of [-1,1].
//
// Ramps are C^1 but not C^2; at a ramp/plateau breakpoint the jet takes
// the one-sided limit from the ramp side.
struct Decomposition1D {
  int K = 1;
  double delta = 0.5;

  Decomposition1D(int subdomains, double overlap);

  double a(int k) const { return (2.0 * k - delta) / K - 1.0; }
  double b(int k) const { return (2.0 * (k + 1) + delta) / K - 1.0; }
  double ramp() const { return 2.0 * delta / K; }

  Jet2 window(int k, const Jet2& x) const;
  Jet2 normalize(int k, const Jet2& x) const;  // affine map onto [-1,1]

  bool covers(int k, double x) const;  // omega_k(x) > 0
  void covering(double x, std::vector<int>& out) const;

  // Pairs (k, l), k <= l, whose supports intersect inside the domain.
  std::vector<std::pair<int, int>> adjacency() const;
};

// Tensor-product decomposition of [-1,1]^2. Subdomain (ix, iy) gets the
// flat index ix + kx * iy; its window is the product of the axis windows.
struct Decomposition2D {
  Decomposition1D x;
  Decomposition1D y;

  Decomposition2D(int kx, int ky, double deltax, double deltay)
      : x(kx, deltax), y(ky, deltay) {}

  int n_subdomains() const { return x.K * y.K; }
  int flat_index(int ix, int iy) const { return ix + x.K * iy; }
  int axis_x(int k) const { return k % x.K; }
  int axis_y(int k) const { return k / x.K; }

  Jet2 window(int k, const Jet2& xj, const Jet2& yj) const {
    return x.window(axis_x(k), xj) * y.window(axis_y(k), yj);
  }

  void covering(double px, double py, std::vector<int>& out) const;
  std::vector<std::pair<int, int>> adjacency() const;
};

// Hard boundary constraint, applied multiplicatively to the network field
// so the boundary condition holds exactly.
struct ConstraintOp {
  enum class Kind {
    TanhScaled,     // c(x) = tanh(kappa*pi*x), vanishes at x = 0
    ProductBubble,  // c(x,y) = (1-x^2)(1-y^2), vanishes on the unit square boundary
  };

  Kind kind = Kind::TanhScaled;
  double kappa = 16.0;

  // Point jets, one per coordinate, seeded along the active axis.
  Jet2 eval(std::span<const Jet2> point) const;
};

inline Jet2 constraint_apply(const ConstraintOp& c, std::span<const Jet2> point,
                             const Jet2& u) {
  return c.eval(point) * u;
}

}  // namespace fbpinn
