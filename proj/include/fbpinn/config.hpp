#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fbpinn {

// Experiment configuration, read from an INI-style file of
// `key = value` lines grouped under [section] headers. Unknown keys are
// rejected. See the repository README for the schema.
struct RunConfig {
  // [problem]
  std::string problem = "ode1d_hf";  // ode1d_hf | helmholtz2d
  double kappa = 16.0;               // tanh constraint scale (1D)

  // [model]
  std::string model_type = "fbpinn";  // fbpinn | vanilla
  std::vector<int> layers = {1, 20, 1};
  std::string activation = "tanh";
  int kx = 24, ky = 1;
  double deltax = 0.5, deltay = 0.5;
  std::string init = "uniform";  // uniform | glorot
  std::uint64_t seed = 0;

  // [optimizer]
  std::string method = "gn";  // adam | gn
  double adam_lr = 1e-3;
  double eta = 1e-2;
  double mu = 1.0;
  std::string solver = "block_cg";  // block_cg | dense_cholesky
  double cg_tol = 1e-10;
  int cg_max_iter = 0;
  int max_iters = 1000;
  double loss_tol = 0.0;

  // [collocation]
  int colloc_nx = 1000, colloc_ny = 100;

  // [test_grid]
  int test_nx = 2001, test_ny = 101;

  // [run]
  int threads = 0;  // 0: leave the OpenMP default
  std::string out_dir = "run_out";

  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text);

  void validate() const;
  int dim() const { return problem == "helmholtz2d" ? 2 : 1; }
  std::string to_ini() const;
};

}  // namespace fbpinn
