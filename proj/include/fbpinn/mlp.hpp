#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fbpinn/jet.hpp"

namespace fbpinn {

// Dense feedforward architecture with a flat parameter layout. Layer i
// maps d_{i-1} -> d_i inputs through W x + b; parameters are stored layer
// after layer, the weight matrix row-major followed by the bias vector.
// tanh is applied after every layer except the last.
struct MlpShape {
  std::vector<int> sizes;
  std::vector<int> layer_offset;  // flat offset of each layer's weight block
  int n_params = 0;

  MlpShape() = default;
  explicit MlpShape(std::vector<int> layer_sizes);

  int n_layers() const { return static_cast<int>(sizes.size()) - 1; }
  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }

  static int param_count(const std::vector<int>& layer_sizes);
};

enum class InitKind {
  GlorotUniform,            // W ~ U[+-sqrt(6/(fan_in+fan_out))], b = 0
  UniformWeightsZeroBias,   // W ~ U[-1,1], b = 0
};

struct InitScheme {
  InitKind kind = InitKind::UniformWeightsZeroBias;
  std::uint64_t seed = 0;
};

// Scratch buffers reused across evaluations; contents are meaningless
// between calls.
struct MlpWorkspace {
  std::vector<Jet2> acts;  // per-layer activations, input included
  std::vector<Jet2> adj;   // pre-activation adjoints for the reverse pass
  std::vector<Jet2> tan;   // forward tangent channel
};

struct Mlp {
  MlpShape shape;
  std::vector<double> params;
};

// Draw order is fixed: layers in ascending order, weights row-major, then
// the bias (always zero). The generator is std::mt19937_64 seeded with
// `seed`; uniform deviates are taken as (x >> 11) * 2^-53 so the stream is
// identical on every platform.
std::vector<double> mlp_init_params(const MlpShape& shape, const InitScheme& init);

Mlp mlp_new(std::vector<int> layer_sizes, const InitScheme& init);

// Forward evaluation in jet arithmetic. input.size() must equal the input
// dimension and the output dimension must be 1.
Jet2 mlp_forward_jet(const MlpShape& shape, std::span<const double> params,
                     std::span<const Jet2> input, MlpWorkspace& ws);
Jet2 mlp_forward_jet(const Mlp& net, std::span<const Jet2> input);

// Derivative of the output jet with respect to a single parameter,
// propagated by a forward tangent channel alongside the spatial jet.
Jet2 mlp_forward_with_param_tangent(const MlpShape& shape, std::span<const double> params,
                                    std::span<const Jet2> input, int param_index,
                                    MlpWorkspace& ws);
Jet2 mlp_forward_with_param_tangent(const Mlp& net, std::span<const Jet2> input,
                                    int param_index);

// Output jet plus its derivative with respect to every parameter at once,
// by reverse accumulation with jet-valued adjoints. tangents must have
// length shape.n_params. Matches the one-at-a-time tangent contract.
Jet2 mlp_forward_backward(const MlpShape& shape, std::span<const double> params,
                          std::span<const Jet2> input, std::span<Jet2> tangents,
                          MlpWorkspace& ws);

// splitmix64 stream over a master seed; subnet k gets the (k+1)-th output.
// Changing the subdomain count leaves earlier subnets' draws untouched.
std::uint64_t subnet_seed(std::uint64_t master, int index);

}  // namespace fbpinn
