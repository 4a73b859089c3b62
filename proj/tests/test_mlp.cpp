#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>
#include <vector>

#include "fbpinn/mlp.hpp"
#include "test_util.hpp"

using namespace fbpinn;
using fbpinn::test::close;
using fbpinn::test::uniform;

TEST_CASE("parameter counts follow the closed-form sum") {
  CHECK(MlpShape::param_count({1, 20, 1}) == 61);
  CHECK(MlpShape::param_count({2, 20, 1}) == 81);
  CHECK(MlpShape::param_count({1, 20, 20, 20, 1}) == 901);
  CHECK(MlpShape({1, 20, 1}).n_params == 61);
  CHECK(MlpShape({5, 3, 2}).n_params == 5 * 3 + 3 + 3 * 2 + 2);
}

TEST_CASE("invalid layer lists are rejected") {
  CHECK_THROWS_AS(MlpShape(std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(MlpShape(std::vector<int>{4}), std::invalid_argument);
  CHECK_THROWS_AS(MlpShape(std::vector<int>{1, 0, 1}), std::invalid_argument);
}

TEST_CASE("same seed gives bit-identical parameters") {
  const InitScheme init{InitKind::UniformWeightsZeroBias, 42};
  const Mlp a = mlp_new({1, 20, 1}, init);
  const Mlp b = mlp_new({1, 20, 1}, init);
  CHECK(a.params == b.params);
  const Mlp c = mlp_new({1, 20, 1}, InitScheme{InitKind::UniformWeightsZeroBias, 43});
  CHECK(a.params != c.params);
}

TEST_CASE("init schemes respect their bounds and zero biases") {
  const MlpShape shape({3, 7, 1});
  const auto uni = mlp_init_params(shape, {InitKind::UniformWeightsZeroBias, 7});
  const auto glorot = mlp_init_params(shape, {InitKind::GlorotUniform, 7});
  // layer 0: 7x3 weights then 7 biases; layer 1: 1x7 weights then 1 bias
  for (int i = 0; i < 21; ++i) {
    CHECK(std::abs(uni[i]) <= 1.0);
    CHECK(std::abs(glorot[i]) <= std::sqrt(6.0 / 10.0));
  }
  for (int i = 21; i < 28; ++i) {
    CHECK(uni[i] == 0.0);
    CHECK(glorot[i] == 0.0);
  }
  CHECK(glorot[shape.n_params - 1] == 0.0);
}

TEST_CASE("zero-parameter network maps everything to the zero jet") {
  Mlp net = mlp_new({1, 20, 1}, {InitKind::UniformWeightsZeroBias, 0});
  std::fill(net.params.begin(), net.params.end(), 0.0);
  const Jet2 in[] = {jet_var(0.37)};
  const Jet2 out = mlp_forward_jet(net, in);
  CHECK(out.val == 0.0);
  CHECK(out.d1 == 0.0);
  CHECK(out.d2 == 0.0);
}

TEST_CASE("single affine layer is the identity map") {
  Mlp net;
  net.shape = MlpShape({1, 1});
  net.params = {1.0, 0.0};  // W = 1, b = 0; no activation on the last layer
  const Jet2 in[] = {Jet2{0.4, 2.0, -1.5}};
  const Jet2 out = mlp_forward_jet(net, in);
  CHECK(out.val == 0.4);
  CHECK(out.d1 == 2.0);
  CHECK(out.d2 == -1.5);
}

namespace {

double plain_forward(const Mlp& net, double x) {
  MlpWorkspace ws;
  const Jet2 in[] = {jet_var(x)};
  return mlp_forward_jet(net.shape, net.params, in, ws).val;
}

}  // namespace

TEST_CASE("spatial jets match finite differences of the plain forward") {
  const Mlp net = mlp_new({1, 20, 1}, {InitKind::UniformWeightsZeroBias, 5});
  std::mt19937_64 rng(17);
  MlpWorkspace ws;
  for (int trial = 0; trial < 20; ++trial) {
    const double x = uniform(rng, -1.0, 1.0);
    const Jet2 in[] = {jet_var(x)};
    const Jet2 out = mlp_forward_jet(net.shape, net.params, in, ws);
    const auto fd = fbpinn::test::central_diff([&](double t) { return plain_forward(net, t); }, x);
    CHECK_MESSAGE(close(out.d1, fd.d1, 1e-5, 1e-7), "d1: ", out.d1, " vs ", fd.d1);
    CHECK_MESSAGE(close(out.d2, fd.d2, 1e-5, 1e-4), "d2: ", out.d2, " vs ", fd.d2);
  }
}

TEST_CASE("output-layer bias tangent is one with flat spatial derivatives") {
  const Mlp net = mlp_new({1, 20, 1}, {InitKind::UniformWeightsZeroBias, 11});
  const Jet2 in[] = {jet_var(0.21)};
  const Jet2 tan = mlp_forward_with_param_tangent(net, in, net.shape.n_params - 1);
  CHECK(tan.val == 1.0);
  CHECK(tan.d1 == 0.0);
  CHECK(tan.d2 == 0.0);
}

TEST_CASE("zero network blocks first-layer weight tangents") {
  Mlp net = mlp_new({1, 20, 1}, {InitKind::UniformWeightsZeroBias, 0});
  std::fill(net.params.begin(), net.params.end(), 0.0);
  const Jet2 in[] = {jet_var(0.0)};
  const Jet2 tan = mlp_forward_with_param_tangent(net, in, 0);
  CHECK(tan.val == 0.0);
  CHECK(tan.d1 == 0.0);
  CHECK(tan.d2 == 0.0);
}

TEST_CASE("parameter tangent index is range checked") {
  const Mlp net = mlp_new({1, 4, 1}, {InitKind::UniformWeightsZeroBias, 3});
  const Jet2 in[] = {jet_var(0.1)};
  CHECK_THROWS_AS(mlp_forward_with_param_tangent(net, in, -1), std::out_of_range);
  CHECK_THROWS_AS(mlp_forward_with_param_tangent(net, in, net.shape.n_params),
                  std::out_of_range);
}

TEST_CASE("parameter tangents match finite differences in each parameter") {
  Mlp net = mlp_new({1, 20, 1}, {InitKind::UniformWeightsZeroBias, 23});
  std::mt19937_64 rng(31);
  MlpWorkspace ws;
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const double x = uniform(rng, -1.0, 1.0);
    const Jet2 in[] = {jet_var(x)};
    for (int probe = 0; probe < 20; ++probe) {
      const int j = static_cast<int>(rng() % net.shape.n_params);
      const Jet2 tan = mlp_forward_with_param_tangent(net.shape, net.params, in, j, ws);
      const double saved = net.params[j];
      net.params[j] = saved + h;
      const Jet2 up = mlp_forward_jet(net.shape, net.params, in, ws);
      net.params[j] = saved - h;
      const Jet2 dn = mlp_forward_jet(net.shape, net.params, in, ws);
      net.params[j] = saved;
      CHECK_MESSAGE(close(tan.val, (up.val - dn.val) / (2 * h), 1e-5, 1e-8),
                    "tangent val, param ", j);
      CHECK_MESSAGE(close(tan.d1, (up.d1 - dn.d1) / (2 * h), 1e-5, 1e-6),
                    "tangent d1, param ", j);
      CHECK_MESSAGE(close(tan.d2, (up.d2 - dn.d2) / (2 * h), 1e-5, 1e-4),
                    "tangent d2, param ", j);
    }
  }
}

TEST_CASE("reverse accumulation reproduces the forward tangent channel") {
  for (auto layers : {std::vector<int>{1, 20, 1}, std::vector<int>{2, 20, 1},
                      std::vector<int>{1, 8, 8, 1}}) {
    const Mlp net = mlp_new(layers, {InitKind::UniformWeightsZeroBias, 77});
    std::mt19937_64 rng(101);
    MlpWorkspace ws;
    std::vector<Jet2> input(net.shape.input_dim());
    for (std::size_t d = 0; d < input.size(); ++d)
      input[d] = d == 0 ? jet_var(uniform(rng, -1, 1)) : jet_const(uniform(rng, -1, 1));
    std::vector<Jet2> tangents(net.shape.n_params);
    const Jet2 out = mlp_forward_backward(net.shape, net.params, input, tangents, ws);
    const Jet2 ref_out = mlp_forward_jet(net.shape, net.params, input, ws);
    CHECK(out.val == ref_out.val);
    CHECK(out.d1 == ref_out.d1);
    CHECK(out.d2 == ref_out.d2);
    for (int j = 0; j < net.shape.n_params; ++j) {
      const Jet2 ref = mlp_forward_with_param_tangent(net.shape, net.params, input, j, ws);
      CHECK_MESSAGE(close(tangents[j].val, ref.val, 1e-12, 1e-14), "param ", j);
      CHECK_MESSAGE(close(tangents[j].d1, ref.d1, 1e-12, 1e-13), "param ", j);
      CHECK_MESSAGE(close(tangents[j].d2, ref.d2, 1e-12, 1e-12), "param ", j);
    }
  }
}

TEST_CASE("subnet seeds are stable under index and differ across indices") {
  CHECK(subnet_seed(9, 0) == subnet_seed(9, 0));
  CHECK(subnet_seed(9, 0) != subnet_seed(9, 1));
  CHECK(subnet_seed(9, 3) != subnet_seed(10, 3));
  // extending the subdomain count keeps earlier seeds
  for (int k = 0; k < 4; ++k) CHECK(subnet_seed(123, k) == subnet_seed(123, k));
}
