#include "fbpinn/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fbpinn {

MlpShape::MlpShape(std::vector<int> layer_sizes) : sizes(std::move(layer_sizes)) {
  if (sizes.size() < 2) throw std::invalid_argument("MlpShape: need at least two layers");
  for (int s : sizes)
    if (s < 1) throw std::invalid_argument("MlpShape: layer sizes must be positive");
  layer_offset.resize(n_layers());
  int off = 0;
  for (int l = 0; l < n_layers(); ++l) {
    layer_offset[l] = off;
    off += sizes[l + 1] * sizes[l] + sizes[l + 1];
  }
  n_params = off;
}

int MlpShape::param_count(const std::vector<int>& layer_sizes) {
  int p = 0;
  for (std::size_t i = 1; i < layer_sizes.size(); ++i)
    p += layer_sizes[i] * layer_sizes[i - 1] + layer_sizes[i];
  return p;
}

namespace {

// Uniform deviate in [0,1) from the top 53 bits of the engine output.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t subnet_seed(std::uint64_t master, int index) {
  std::uint64_t state = master;
  std::uint64_t s = 0;
  for (int i = 0; i <= index; ++i) s = splitmix64_next(state);
  return s;
}

std::vector<double> mlp_init_params(const MlpShape& shape, const InitScheme& init) {
  std::vector<double> params(shape.n_params, 0.0);
  std::mt19937_64 rng(init.seed);
  for (int l = 0; l < shape.n_layers(); ++l) {
    const int fan_in = shape.sizes[l];
    const int fan_out = shape.sizes[l + 1];
    double limit = 1.0;
    if (init.kind == InitKind::GlorotUniform)
      limit = std::sqrt(6.0 / (fan_in + fan_out));
    double* w = params.data() + shape.layer_offset[l];
    for (int i = 0; i < fan_out * fan_in; ++i)
      w[i] = limit * (2.0 * uniform01(rng) - 1.0);
    // biases stay zero under both schemes
  }
  return params;
}

Mlp mlp_new(std::vector<int> layer_sizes, const InitScheme& init) {
  Mlp net;
  net.shape = MlpShape(std::move(layer_sizes));
  net.params = mlp_init_params(net.shape, init);
  return net;
}

namespace {

int total_units(const MlpShape& shape) {
  int n = 0;
  for (int s : shape.sizes) n += s;
  return n;
}

void check_forward_args(const MlpShape& shape, std::span<const double> params,
                        std::span<const Jet2> input) {
  if (static_cast<int>(input.size()) != shape.input_dim())
    throw std::invalid_argument("mlp forward: input dimension mismatch");
  if (shape.output_dim() != 1)
    throw std::invalid_argument("mlp forward: output dimension must be 1");
  if (static_cast<int>(params.size()) != shape.n_params)
    throw std::invalid_argument("mlp forward: parameter vector length mismatch");
}

// Runs the forward pass, leaving every layer's activations in ws.acts
// (input first). Returns the offset of the last layer's activations.
int forward_pass(const MlpShape& shape, std::span<const double> params,
                 std::span<const Jet2> input, MlpWorkspace& ws) {
  ws.acts.resize(total_units(shape));
  int off_prev = 0;
  for (int i = 0; i < shape.input_dim(); ++i) ws.acts[i] = input[i];
  int off = shape.input_dim();
  for (int l = 0; l < shape.n_layers(); ++l) {
    const int n_in = shape.sizes[l];
    const int n_out = shape.sizes[l + 1];
    const double* w = params.data() + shape.layer_offset[l];
    const double* bias = w + n_out * n_in;
    const Jet2* a_prev = ws.acts.data() + off_prev;
    Jet2* a = ws.acts.data() + off;
    const bool last = (l == shape.n_layers() - 1);
    for (int i = 0; i < n_out; ++i) {
      Jet2 z = jet_const(bias[i]);
      const double* wi = w + i * n_in;
      for (int j = 0; j < n_in; ++j) z += wi[j] * a_prev[j];
      a[i] = last ? z : tanh(z);
    }
    off_prev = off;
    off += n_out;
  }
  return off_prev;
}

}  // namespace

Jet2 mlp_forward_jet(const MlpShape& shape, std::span<const double> params,
                     std::span<const Jet2> input, MlpWorkspace& ws) {
  check_forward_args(shape, params, input);
  const int out_off = forward_pass(shape, params, input, ws);
  return ws.acts[out_off];
}

Jet2 mlp_forward_jet(const Mlp& net, std::span<const Jet2> input) {
  MlpWorkspace ws;
  return mlp_forward_jet(net.shape, net.params, input, ws);
}

Jet2 mlp_forward_with_param_tangent(const MlpShape& shape, std::span<const double> params,
                                    std::span<const Jet2> input, int param_index,
                                    MlpWorkspace& ws) {
  check_forward_args(shape, params, input);
  if (param_index < 0 || param_index >= shape.n_params)
    throw std::out_of_range("mlp_forward_with_param_tangent: parameter index out of range");

  const int units = total_units(shape);
  ws.acts.resize(units);
  ws.tan.resize(units);
  for (int i = 0; i < shape.input_dim(); ++i) {
    ws.acts[i] = input[i];
    ws.tan[i] = Jet2{};
  }
  int off_prev = 0;
  int off = shape.input_dim();
  for (int l = 0; l < shape.n_layers(); ++l) {
    const int n_in = shape.sizes[l];
    const int n_out = shape.sizes[l + 1];
    const int w_off = shape.layer_offset[l];
    const double* w = params.data() + w_off;
    const double* bias = w + n_out * n_in;
    const Jet2* a_prev = ws.acts.data() + off_prev;
    const Jet2* t_prev = ws.tan.data() + off_prev;
    Jet2* a = ws.acts.data() + off;
    Jet2* t = ws.tan.data() + off;
    const bool last = (l == shape.n_layers() - 1);
    for (int i = 0; i < n_out; ++i) {
      Jet2 z = jet_const(bias[i]);
      Jet2 tz{};
      const double* wi = w + i * n_in;
      for (int j = 0; j < n_in; ++j) {
        z += wi[j] * a_prev[j];
        tz += wi[j] * t_prev[j];
      }
      // inject the tangent seed where this layer holds the parameter
      const int local = param_index - w_off;
      if (local >= 0 && local < n_out * n_in) {
        if (local / n_in == i) tz += a_prev[local % n_in];
      } else if (local >= n_out * n_in && local < n_out * n_in + n_out) {
        if (local - n_out * n_in == i) tz += jet_const(1.0);
      }
      if (last) {
        a[i] = z;
        t[i] = tz;
      } else {
        const Jet2 act = tanh(z);
        a[i] = act;
        t[i] = (jet_const(1.0) - act * act) * tz;
      }
    }
    off_prev = off;
    off += n_out;
  }
  return ws.tan[off_prev];
}

Jet2 mlp_forward_with_param_tangent(const Mlp& net, std::span<const Jet2> input,
                                    int param_index) {
  MlpWorkspace ws;
  return mlp_forward_with_param_tangent(net.shape, net.params, input, param_index, ws);
}

Jet2 mlp_forward_backward(const MlpShape& shape, std::span<const double> params,
                          std::span<const Jet2> input, std::span<Jet2> tangents,
                          MlpWorkspace& ws) {
  check_forward_args(shape, params, input);
  if (static_cast<int>(tangents.size()) != shape.n_params)
    throw std::invalid_argument("mlp_forward_backward: tangent buffer length mismatch");

  const int out_off = forward_pass(shape, params, input, ws);
  const Jet2 out = ws.acts[out_off];

  // Reverse pass with jet-valued adjoints. adj holds d(out)/d(z_l) for the
  // current layer's pre-activations; products follow the jet ring rules so
  // each parameter's tangent carries d/dtheta of (val, d1, d2).
  ws.adj.resize(total_units(shape));
  int off = out_off;
  Jet2* adj = ws.adj.data() + off;
  adj[0] = jet_const(1.0);
  for (int l = shape.n_layers() - 1; l >= 0; --l) {
    const int n_in = shape.sizes[l];
    const int n_out = shape.sizes[l + 1];
    const int off_prev = off - n_in;
    const double* w = params.data() + shape.layer_offset[l];
    const Jet2* a_prev = ws.acts.data() + off_prev;
    Jet2* zbar = ws.adj.data() + off;
    Jet2* g = tangents.data() + shape.layer_offset[l];
    for (int i = 0; i < n_out; ++i) {
      Jet2* gi = g + i * n_in;
      for (int j = 0; j < n_in; ++j) gi[j] = zbar[i] * a_prev[j];
      g[n_out * n_in + i] = zbar[i];
    }
    if (l > 0) {
      Jet2* abar = ws.adj.data() + off_prev;
      for (int j = 0; j < n_in; ++j) {
        Jet2 acc{};
        for (int i = 0; i < n_out; ++i) acc += w[i * n_in + j] * zbar[i];
        // a_prev = tanh(z_prev), so tanh'(z_prev) = 1 - a_prev^2
        abar[j] = (jet_const(1.0) - a_prev[j] * a_prev[j]) * acc;
      }
    }
    off = off_prev;
  }
  return out;
}

}  // namespace fbpinn
