#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "fbpinn/harness.hpp"

namespace {

fbpinn::RunConfig load_config(const std::string& path, const std::string& out_override) {
  fbpinn::RunConfig cfg = fbpinn::RunConfig::from_file(path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  cfg.validate();
  return cfg;
}

void print_report(const fbpinn::RunReport& report, const std::string& dir) {
  std::printf("final_loss   %.6e\n", report.final_loss);
  std::printf("rel_l2_error %.6e\n", report.rel_l2);
  std::printf("iterations   %d (updates %d%s)\n", report.iterations, report.updates,
              report.hit_tol ? ", loss tolerance reached" : "");
  std::printf("wall_time_s  %.2f\n", report.wall_time_s);
  std::printf("outputs      %s\n", dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain-decomposed PINN solver with Adam and Gauss-Newton training"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int n_seeds = 5;

  auto* run = app.add_subcommand("run", "train one configuration and write its artifacts");
  run->add_option("config", config_path, "INI config file")->required();
  run->add_option("--out", out_dir, "override the output directory");

  auto* gram = app.add_subcommand("gram", "export the Gram sparsity pattern at initialization");
  gram->add_option("config", config_path, "INI config file")->required();
  gram->add_option("--out", out_dir, "override the output directory");

  auto* sweep = app.add_subcommand("sweep", "train across consecutive seeds and summarize");
  sweep->add_option("config", config_path, "INI config file")->required();
  sweep->add_option("--seeds", n_seeds, "number of seeds")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_dir, "override the output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    const fbpinn::RunConfig cfg = load_config(config_path, out_dir);
    if (run->parsed()) {
      print_report(fbpinn::run_experiment(cfg), cfg.out_dir);
    } else if (gram->parsed()) {
      const fbpinn::Problem problem = fbpinn::make_problem(cfg.problem, cfg.kappa);
      const auto colloc =
          fbpinn::collocation_uniform(cfg.dim(), {cfg.colloc_nx, cfg.colloc_ny});
      const auto model = fbpinn::build_model(cfg, problem);
      std::filesystem::create_directories(cfg.out_dir);
      const std::string path = cfg.out_dir + "/gram_pattern.txt";
      fbpinn::export_gram_pattern(*model, problem, colloc, path);
      if (cfg.model_type == "fbpinn") {
        fbpinn::write_subdomain_table(fbpinn::Decomposition1D(cfg.kx, cfg.deltax),
                                      cfg.out_dir + "/subdomains_x.txt");
        if (cfg.dim() == 2)
          fbpinn::write_subdomain_table(fbpinn::Decomposition1D(cfg.ky, cfg.deltay),
                                        cfg.out_dir + "/subdomains_y.txt");
      }
      std::printf("pattern      %s\n", path.c_str());
    } else if (sweep->parsed()) {
      const fbpinn::SweepResult result = fbpinn::run_sweep(cfg, n_seeds);
      for (std::size_t i = 0; i < result.reports.size(); ++i)
        std::printf("seed %llu  loss %.6e  rel_l2 %.6e\n",
                    static_cast<unsigned long long>(result.seeds[i]),
                    result.reports[i].final_loss, result.reports[i].rel_l2);
      std::printf("median rel_l2 %.6e  best %.6e\n", result.median_rel_l2,
                  result.best_rel_l2);
    }
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
