#include "fbpinn/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fbpinn {

Decomposition1D::Decomposition1D(int subdomains, double overlap)
    : K(subdomains), delta(overlap) {
  if (K < 1) throw std::invalid_argument("Decomposition1D: need at least one subdomain");
  if (!(delta > 0.0)) throw std::invalid_argument("Decomposition1D: overlap must be positive");
}

Jet2 Decomposition1D::window(int k, const Jet2& x) const {
  const double ak = a(k), bk = b(k), r = ramp();
  const bool clamp_lo = (k == 0);
  const bool clamp_hi = (k == K - 1);
  const double v = x.val;

  if (!clamp_lo && v < ak) return Jet2{};
  if (!clamp_hi && v > bk) return Jet2{};

  // Breakpoints resolve to the ramp side.
  if (!clamp_lo && v <= ak + r)
    return 0.5 * (1.0 - cos((x - ak) * (std::numbers::pi / r)));
  if (!clamp_hi && v >= bk - r)
    return 0.5 * (1.0 - cos((x - bk) * (std::numbers::pi / r)));
  return jet_const(1.0);
}

Jet2 Decomposition1D::normalize(int k, const Jet2& x) const {
  const double ak = a(k), bk = b(k);
  return (x - ak) * (2.0 / (bk - ak)) - 1.0;
}

bool Decomposition1D::covers(int k, double x) const {
  const bool clamp_lo = (k == 0);
  const bool clamp_hi = (k == K - 1);
  if (!clamp_lo && x <= a(k)) return false;
  if (!clamp_hi && x >= b(k)) return false;
  return true;
}

void Decomposition1D::covering(double x, std::vector<int>& out) const {
  out.clear();
  for (int k = 0; k < K; ++k)
    if (covers(k, x)) out.push_back(k);
}

std::vector<std::pair<int, int>> Decomposition1D::adjacency() const {
  // Support intervals, clamped windows extended to the domain boundary.
  auto lo = [&](int k) { return k == 0 ? -1.0 : std::max(a(k), -1.0); };
  auto hi = [&](int k) { return k == K - 1 ? 1.0 : std::min(b(k), 1.0); };
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k < K; ++k)
    for (int l = k; l < K; ++l)
      if (std::max(lo(k), lo(l)) < std::min(hi(k), hi(l))) pairs.emplace_back(k, l);
  return pairs;
}

void Decomposition2D::covering(double px, double py, std::vector<int>& out) const {
  out.clear();
  for (int iy = 0; iy < y.K; ++iy) {
    if (!y.covers(iy, py)) continue;
    for (int ix = 0; ix < x.K; ++ix)
      if (x.covers(ix, px)) out.push_back(flat_index(ix, iy));
  }
  std::sort(out.begin(), out.end());
}

std::vector<std::pair<int, int>> Decomposition2D::adjacency() const {
  const auto ax = x.adjacency();
  const auto ay = y.adjacency();
  // Symmetrize the per-axis pair lists, then combine.
  auto full = [](const std::vector<std::pair<int, int>>& half) {
    std::vector<std::pair<int, int>> v;
    for (auto [k, l] : half) {
      v.emplace_back(k, l);
      if (k != l) v.emplace_back(l, k);
    }
    return v;
  };
  std::vector<std::pair<int, int>> pairs;
  for (auto [x1, x2] : full(ax))
    for (auto [y1, y2] : full(ay)) {
      const int k = flat_index(x1, y1);
      const int l = flat_index(x2, y2);
      if (k <= l) pairs.emplace_back(k, l);
    }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

Jet2 ConstraintOp::eval(std::span<const Jet2> point) const {
  switch (kind) {
    case Kind::TanhScaled:
      return tanh(point[0] * (kappa * std::numbers::pi));
    case Kind::ProductBubble: {
      const Jet2 px = 1.0 - point[0] * point[0];
      const Jet2 py = 1.0 - point[1] * point[1];
      return px * py;
    }
  }
  return Jet2{};
}

}  // namespace fbpinn
