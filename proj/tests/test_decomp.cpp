#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fbpinn/decomp.hpp"
#include "test_util.hpp"

using namespace fbpinn;
using fbpinn::test::close;
using fbpinn::test::uniform;

TEST_CASE("subdomain bounds follow the closed form") {
  const Decomposition1D dec(24, 0.5);
  CHECK(dec.a(0) == doctest::Approx(-0.5 / 24.0 - 1.0).epsilon(1e-14));
  CHECK(dec.b(0) == doctest::Approx(2.5 / 24.0 - 1.0).epsilon(1e-14));
  CHECK(dec.a(0) == doctest::Approx(-1.0208333333333333).epsilon(1e-12));
  CHECK(dec.b(0) == doctest::Approx(-0.8958333333333333).epsilon(1e-12));
  CHECK(dec.ramp() == doctest::Approx(1.0 / 24.0));
  CHECK_THROWS_AS(Decomposition1D(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(Decomposition1D(4, 0.0), std::invalid_argument);
}

TEST_CASE("window values on plateau and mid-ramp") {
  const Decomposition1D dec(24, 0.5);
  const int k = 11;
  const double mid = 0.5 * (dec.a(k) + dec.b(k));
  const Jet2 plateau = dec.window(k, jet_var(mid));
  CHECK(plateau.val == 1.0);
  CHECK(plateau.d1 == 0.0);
  CHECK(plateau.d2 == 0.0);

  const Jet2 half = dec.window(k, jet_var(dec.a(k) + 0.5 * dec.ramp()));
  CHECK(half.val == doctest::Approx(0.5).epsilon(1e-14));

  CHECK(dec.window(k, jet_var(dec.a(k) - 0.01)).val == 0.0);
  CHECK(dec.window(k, jet_var(dec.b(k) + 0.01)).val == 0.0);
}

TEST_CASE("clamped boundary windows hold one out to the domain edge") {
  const Decomposition1D dec(5, 0.5);
  CHECK(dec.window(0, jet_var(-1.0)).val == 1.0);
  CHECK(dec.window(4, jet_var(1.0)).val == 1.0);
  // single subdomain: window is identically one
  const Decomposition1D one(1, 0.3);
  for (double x : {-1.0, -0.2, 0.9}) {
    const Jet2 w = one.window(0, jet_var(x));
    CHECK(w.val == 1.0);
    CHECK(w.d1 == 0.0);
  }
}

TEST_CASE("windows sum to one across the domain") {
  const Decomposition1D dec(24, 0.5);
  for (int i = 0; i < 1000; ++i) {
    const double x = -1.0 + 2.0 * i / 999.0;
    double sum = 0.0;
    for (int k = 0; k < dec.K; ++k) sum += dec.window(k, jet_var(x)).val;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("window jets match finite differences away from breakpoints") {
  const Decomposition1D dec(8, 0.5);
  std::mt19937_64 rng(5);
  const double h = 1e-5;  // ramp curvature is steep enough to pollute coarser stencils
  std::vector<double> breakpoints;
  for (int k = 0; k < dec.K; ++k)
    for (double b : {dec.a(k), dec.a(k) + dec.ramp(), dec.b(k) - dec.ramp(), dec.b(k)})
      breakpoints.push_back(b);

  int tested = 0;
  while (tested < 100) {
    const double x = uniform(rng, -1.0, 1.0);
    bool near_break = false;
    for (double b : breakpoints)
      if (std::abs(x - b) < 5 * h) near_break = true;
    if (near_break) continue;
    ++tested;
    for (int k = 0; k < dec.K; ++k) {
      const Jet2 w = dec.window(k, jet_var(x));
      const auto fd = fbpinn::test::central_diff(
          [&](double t) { return dec.window(k, jet_var(t)).val; }, x, h);
      CHECK_MESSAGE(close(w.d1, fd.d1, 1e-6, 1e-7), "window ", k, " d1 at ", x);
      CHECK_MESSAGE(close(w.d2, fd.d2, 1e-6, 1e-3), "window ", k, " d2 at ", x);
    }
  }
}

TEST_CASE("breakpoint jets take the one-sided ramp limit") {
  const Decomposition1D dec(8, 0.5);
  const int k = 3;
  const double r = dec.ramp();
  const double curvature = std::numbers::pi * std::numbers::pi / (2.0 * r * r);

  // top of the rising ramp: value and slope continuous, curvature from the ramp
  const Jet2 top = dec.window(k, jet_var(dec.a(k) + r));
  CHECK(top.val == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(top.d1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(top.d2 == doctest::Approx(-curvature).epsilon(1e-10));

  const Jet2 start = dec.window(k, jet_var(dec.a(k)));
  CHECK(start.val == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(start.d1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(start.d2 == doctest::Approx(curvature).epsilon(1e-10));
}

TEST_CASE("normalization maps subdomains onto the reference interval") {
  const Decomposition1D dec(24, 0.5);
  for (int k : {0, 7, 23}) {
    CHECK(dec.normalize(k, jet_var(dec.a(k))).val == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(dec.normalize(k, jet_var(dec.b(k))).val == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dec.normalize(k, jet_var(0.5 * (dec.a(k) + dec.b(k)))).val ==
          doctest::Approx(0.0).epsilon(1e-13));
    // affine: first derivative scales, second vanishes
    const Jet2 n = dec.normalize(k, jet_var(0.1));
    CHECK(n.d1 == doctest::Approx(2.0 / (dec.b(k) - dec.a(k))).epsilon(1e-14));
    CHECK(n.d2 == 0.0);
  }
}

TEST_CASE("normalization inverse composition is the identity") {
  const Decomposition1D dec(6, 0.4);
  std::mt19937_64 rng(8);
  for (int k = 0; k < dec.K; ++k) {
    for (int i = 0; i < 20; ++i) {
      const double x = uniform(rng, dec.a(k), dec.b(k));
      const double n = dec.normalize(k, jet_var(x)).val;
      const double back = dec.a(k) + 0.5 * (n + 1.0) * (dec.b(k) - dec.a(k));
      CHECK(std::abs(back - x) < 1e-14);
    }
    // monotone
    CHECK(dec.normalize(k, jet_var(dec.a(k) + 0.01)).val <
          dec.normalize(k, jet_var(dec.a(k) + 0.02)).val);
  }
}

TEST_CASE("covering matches strictly positive windows") {
  const Decomposition1D dec(24, 0.5);
  std::vector<int> cov;

  const double plateau5 = 0.5 * (dec.a(5) + dec.b(5));
  dec.covering(plateau5, cov);
  CHECK(cov == std::vector<int>{5});

  const double overlap56 = 0.5 * (dec.a(6) + dec.b(5));
  dec.covering(overlap56, cov);
  CHECK(cov == std::vector<int>{5, 6});

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = uniform(rng, -1.0, 1.0);
    dec.covering(x, cov);
    std::vector<int> expected;
    for (int k = 0; k < dec.K; ++k)
      if (dec.window(k, jet_var(x)).val > 0.0) expected.push_back(k);
    CHECK(cov == expected);
    CHECK(cov.size() <= 2);
  }
}

TEST_CASE("tensor windows cover and sum to one in 2D") {
  const Decomposition2D dec(2, 2, 0.5, 0.5);
  std::vector<int> cov;
  dec.covering(0.0, 0.0, cov);
  CHECK(cov == std::vector<int>{0, 1, 2, 3});

  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const double x = uniform(rng, -1.0, 1.0);
    const double y = uniform(rng, -1.0, 1.0);
    double sum = 0.0;
    for (int k = 0; k < dec.n_subdomains(); ++k)
      sum += dec.window(k, jet_var(x), jet_const(y)).val;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("adjacency is nearest neighbor for moderate overlap") {
  const Decomposition1D dec(8, 0.5);
  const auto pairs = dec.adjacency();
  std::vector<std::pair<int, int>> expected;
  for (int k = 0; k < 8; ++k) {
    expected.emplace_back(k, k);
    if (k + 1 < 8) expected.emplace_back(k, k + 1);
  }
  std::sort(expected.begin(), expected.end());
  CHECK(pairs == expected);

  // all four 2D subdomains meet in the central overlap
  const auto pairs2 = Decomposition2D(2, 2, 0.5, 0.5).adjacency();
  CHECK(pairs2.size() == 10);  // 4 self pairs + 6 cross pairs
}

TEST_CASE("tanh constraint vanishes at the origin with the right slope") {
  const ConstraintOp c{ConstraintOp::Kind::TanhScaled, 16.0};
  const Jet2 x[] = {jet_var(0.0)};
  const Jet2 u = jet_const(0.7);
  const Jet2 v = constraint_apply(c, x, u);
  CHECK(v.val == 0.0);
  CHECK(v.d1 == doctest::Approx(16.0 * std::numbers::pi * 0.7).epsilon(1e-12));
}

TEST_CASE("bubble constraint vanishes on the square boundary") {
  const ConstraintOp c{ConstraintOp::Kind::ProductBubble, 0.0};
  for (double y : {-0.8, 0.0, 0.6}) {
    const Jet2 x[] = {jet_var(1.0), jet_const(y)};
    CHECK(constraint_apply(c, x, jet_const(2.3)).val == 0.0);
    const Jet2 x2[] = {jet_var(-1.0), jet_const(y)};
    CHECK(constraint_apply(c, x2, jet_const(2.3)).val == 0.0);
  }
}

TEST_CASE("bubble constraint with unit field is the product bubble") {
  const ConstraintOp c{ConstraintOp::Kind::ProductBubble, 0.0};
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const double x = uniform(rng, -1.0, 1.0);
    const double y = uniform(rng, -1.0, 1.0);
    const Jet2 pj[] = {jet_var(x), jet_const(y)};
    const Jet2 v = constraint_apply(c, pj, jet_const(1.0));
    CHECK(v.val == doctest::Approx((1 - x * x) * (1 - y * y)).epsilon(1e-14));
    CHECK(v.d1 == doctest::Approx(-2 * x * (1 - y * y)).epsilon(1e-13));
    CHECK(v.d2 == doctest::Approx(-2 * (1 - y * y)).epsilon(1e-13));
  }
}

TEST_CASE("partition of unity holds for random decompositions") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const int K = 1 + static_cast<int>(rng() % 30);
    const double delta = uniform(rng, 0.05, 0.95);
    const Decomposition1D dec(K, delta);
    for (int i = 0; i < 500; ++i) {
      const double x = -1.0 + 2.0 * i / 499.0;
      double sum = 0.0;
      for (int k = 0; k < K; ++k) sum += dec.window(k, jet_var(x)).val;
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }
}
