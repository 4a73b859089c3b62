#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fbpinn/jet.hpp"
#include "test_util.hpp"

using namespace fbpinn;
using fbpinn::test::central_diff;
using fbpinn::test::close;
using fbpinn::test::uniform;

TEST_CASE("jet seeding rules") {
  for (double x : {0.5, 0.0, -1.0}) {
    const Jet2 j = jet_var(x);
    CHECK(j.val == x);
    CHECK(j.d1 == 1.0);
    CHECK(j.d2 == 0.0);
  }
  for (double c : {3.0, 0.0, std::numbers::pi}) {
    const Jet2 j = jet_const(c);
    CHECK(j.val == c);
    CHECK(j.d1 == 0.0);
    CHECK(j.d2 == 0.0);
  }
}

TEST_CASE("jet primitive derivatives at known points") {
  const Jet2 t = tanh(jet_var(0.0));
  CHECK(t.val == doctest::Approx(0.0));
  CHECK(t.d1 == doctest::Approx(1.0));
  CHECK(t.d2 == doctest::Approx(0.0));

  const Jet2 sq = jet_var(2.0) * jet_var(2.0);
  CHECK(sq.val == doctest::Approx(4.0));
  CHECK(sq.d1 == doctest::Approx(4.0));
  CHECK(sq.d2 == doctest::Approx(2.0));

  const Jet2 s = sin(jet_var(std::numbers::pi / 2.0));
  CHECK(s.val == doctest::Approx(1.0));
  CHECK(s.d1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.d2 == doctest::Approx(-1.0));
}

namespace {

// A nest of every primitive; values only, for finite differencing.
double composite_val(double x) {
  const double a = std::tanh(3.0 * x) * std::sin(2.0 * x + 0.3);
  const double b = std::cos(x * x) - 0.5 * x * x * x;
  return a * b + 2.0 * a - b + std::pow(std::tanh(x), 3);
}

Jet2 composite_jet(const Jet2& x) {
  const Jet2 a = tanh(3.0 * x) * sin(2.0 * x + 0.3);
  const Jet2 b = cos(x * x) - 0.5 * powi(x, 3);
  return a * b + 2.0 * a - b + powi(tanh(x), 3);
}

}  // namespace

TEST_CASE("composed jets match finite differences on random points") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 100; ++trial) {
    const double x = uniform(rng, -1.0, 1.0);
    const Jet2 j = composite_jet(jet_var(x));
    CHECK(j.val == doctest::Approx(composite_val(x)));
    const auto fd = central_diff(composite_val, x);
    CHECK_MESSAGE(close(j.d1, fd.d1, 1e-5, 1e-7), "d1 at x=", x, ": ", j.d1, " vs ", fd.d1);
    CHECK_MESSAGE(close(j.d2, fd.d2, 1e-5, 1e-4), "d2 at x=", x, ": ", j.d2, " vs ", fd.d2);
  }
}

TEST_CASE("constant inputs stay flat through any composition") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Jet2 j = composite_jet(jet_const(uniform(rng, -1.0, 1.0)));
    CHECK(j.d1 == 0.0);
    CHECK(j.d2 == 0.0);
  }
}

TEST_CASE("powi bases") {
  const Jet2 x = jet_var(1.7);
  const Jet2 p0 = powi(x, 0);
  CHECK(p0.val == 1.0);
  CHECK(p0.d1 == 0.0);
  const Jet2 p1 = powi(x, 1);
  CHECK(p1.val == 1.7);
  CHECK(p1.d1 == 1.0);
  const Jet2 p4 = powi(x, 4);
  CHECK(p4.val == doctest::Approx(std::pow(1.7, 4)));
  CHECK(p4.d1 == doctest::Approx(4.0 * std::pow(1.7, 3)));
  CHECK(p4.d2 == doctest::Approx(12.0 * std::pow(1.7, 2)));
}
