#include "fbpinn/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fbpinn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(trim(item)));
  return out;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

}  // namespace

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (const auto h = line.find_first_of("#;"); h != std::string::npos)
      line = trim(line.substr(0, h));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    try {
      if (key == "problem.name") cfg.problem = val;
      else if (key == "problem.kappa") cfg.kappa = std::stod(val);
      else if (key == "model.type") cfg.model_type = val;
      else if (key == "model.layers") cfg.layers = parse_int_list(val);
      else if (key == "model.activation") cfg.activation = val;
      else if (key == "model.kx") cfg.kx = std::stoi(val);
      else if (key == "model.ky") cfg.ky = std::stoi(val);
      else if (key == "model.deltax") cfg.deltax = std::stod(val);
      else if (key == "model.deltay") cfg.deltay = std::stod(val);
      else if (key == "model.init") cfg.init = val;
      else if (key == "model.seed") cfg.seed = std::stoull(val);
      else if (key == "optimizer.method") cfg.method = val;
      else if (key == "optimizer.lr") cfg.adam_lr = std::stod(val);
      else if (key == "optimizer.eta") cfg.eta = std::stod(val);
      else if (key == "optimizer.mu") cfg.mu = std::stod(val);
      else if (key == "optimizer.solver") cfg.solver = val;
      else if (key == "optimizer.cg_tol") cfg.cg_tol = std::stod(val);
      else if (key == "optimizer.cg_max_iter") cfg.cg_max_iter = std::stoi(val);
      else if (key == "optimizer.max_iters") cfg.max_iters = std::stoi(val);
      else if (key == "optimizer.loss_tol") cfg.loss_tol = std::stod(val);
      else if (key == "collocation.nx") cfg.colloc_nx = std::stoi(val);
      else if (key == "collocation.ny") cfg.colloc_ny = std::stoi(val);
      else if (key == "test_grid.nx") cfg.test_nx = std::stoi(val);
      else if (key == "test_grid.ny") cfg.test_ny = std::stoi(val);
      else if (key == "run.threads") cfg.threads = std::stoi(val);
      else if (key == "run.out_dir") cfg.out_dir = val;
      else fail(lineno, "unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      fail(lineno, "cannot parse value '" + val + "' for " + key);
    }
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

void RunConfig::validate() const {
  auto expect = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("config: " + what);
  };
  expect(problem == "ode1d_hf" || problem == "helmholtz2d", "unknown problem '" + problem + "'");
  expect(model_type == "fbpinn" || model_type == "vanilla",
         "unknown model type '" + model_type + "'");
  expect(activation == "tanh", "only tanh activation is supported");
  expect(layers.size() >= 2, "need at least two layer sizes");
  for (int s : layers) expect(s >= 1, "layer sizes must be positive");
  expect(layers.front() == dim(), "first layer size must match the problem dimension");
  expect(layers.back() == 1, "last layer size must be 1");
  expect(init == "uniform" || init == "glorot", "unknown init '" + init + "'");
  expect(method == "adam" || method == "gn", "unknown optimizer '" + method + "'");
  expect(solver == "block_cg" || solver == "dense_cholesky", "unknown solver '" + solver + "'");
  expect(kappa > 0.0, "kappa must be positive");
  expect(adam_lr > 0.0, "lr must be positive");
  expect(eta > 0.0, "eta must be positive");
  expect(mu > 0.0, "mu must be positive");
  expect(cg_tol > 0.0, "cg_tol must be positive");
  expect(max_iters >= 0, "max_iters must be nonnegative");
  expect(loss_tol >= 0.0, "loss_tol must be nonnegative");
  if (model_type == "fbpinn") {
    expect(kx >= 1, "kx must be at least 1");
    expect(deltax > 0.0, "deltax must be positive");
    if (dim() == 2) {
      expect(ky >= 1, "ky must be at least 1");
      expect(deltay > 0.0, "deltay must be positive");
    }
  }
  expect(colloc_nx >= 2, "collocation nx must be at least 2");
  expect(test_nx >= 2, "test grid nx must be at least 2");
  if (dim() == 2) {
    expect(colloc_ny >= 2, "collocation ny must be at least 2");
    expect(test_ny >= 2, "test grid ny must be at least 2");
  }
  expect(threads >= 0, "threads must be nonnegative");
  expect(!out_dir.empty(), "out_dir must not be empty");
}

std::string RunConfig::to_ini() const {
  std::ostringstream out;
  out.precision(17);
  out << "[problem]\n";
  out << "name = " << problem << "\n";
  out << "kappa = " << kappa << "\n\n";
  out << "[model]\n";
  out << "type = " << model_type << "\n";
  out << "layers = ";
  for (std::size_t i = 0; i < layers.size(); ++i)
    out << layers[i] << (i + 1 < layers.size() ? "," : "");
  out << "\n";
  out << "activation = " << activation << "\n";
  if (model_type == "fbpinn") {
    out << "kx = " << kx << "\n";
    out << "deltax = " << deltax << "\n";
    if (dim() == 2) {
      out << "ky = " << ky << "\n";
      out << "deltay = " << deltay << "\n";
    }
  }
  out << "init = " << init << "\n";
  out << "seed = " << seed << "\n\n";
  out << "[optimizer]\n";
  out << "method = " << method << "\n";
  if (method == "adam") {
    out << "lr = " << adam_lr << "\n";
  } else {
    out << "eta = " << eta << "\n";
    out << "mu = " << mu << "\n";
    out << "solver = " << solver << "\n";
    out << "cg_tol = " << cg_tol << "\n";
    out << "cg_max_iter = " << cg_max_iter << "\n";
  }
  out << "max_iters = " << max_iters << "\n";
  out << "loss_tol = " << loss_tol << "\n\n";
  out << "[collocation]\n";
  out << "nx = " << colloc_nx << "\n";
  if (dim() == 2) out << "ny = " << colloc_ny << "\n";
  out << "\n[test_grid]\n";
  out << "nx = " << test_nx << "\n";
  if (dim() == 2) out << "ny = " << test_ny << "\n";
  out << "\n[run]\n";
  out << "threads = " << threads << "\n";
  out << "out_dir = " << out_dir << "\n";
  return out.str();
}

}  // namespace fbpinn
