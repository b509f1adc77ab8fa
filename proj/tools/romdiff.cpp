// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the reduced-order multigroup diffusion toolkit.
// Subcommands mirror the pipeline stages: samples | snapshots | build |
// solve | validate | calibrate.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "romdiff/pipeline.hpp"

namespace {

std::vector<double> parse_mu(const std::string& text) {
  std::vector<double> mu;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      mu.push_back(std::stod(item));
    } catch (...) {
      throw romdiff::ConfigError("--mu: cannot parse '" + item + "' as a number");
    }
  }
  if (mu.empty()) throw romdiff::ConfigError("--mu: no components given");
  return mu;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"romdiff: certified reduced-basis solver for parameterized multigroup "
               "diffusion criticality"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::string out_dir;
  int workers = 0;
  bool overwrite = false;
  std::uint64_t seed = 0;
  bool seed_set = false;

  app.add_option("--config", config_path, "run configuration JSON")->required();
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--workers", workers, "worker thread count")
      ->envname("ROMDIFF_WORKERS");
  app.add_flag("--overwrite", overwrite, "overwrite existing artifacts");
  app.add_option("--seed", seed, "base seed: train = seed, test = seed+1, pref = seed+2")
      ->each([&](const std::string&) { seed_set = true; });

  auto* samples = app.add_subcommand("samples", "generate train/test/pref parameter sets");
  auto* snapshots = app.add_subcommand("snapshots", "high-fidelity solves over the training set");
  auto* build = app.add_subcommand("build", "POD + union basis from the snapshot store");
  auto* solve = app.add_subcommand("solve", "one reduced query");
  auto* validate = app.add_subcommand("validate", "test-set sweep writing errors.csv");
  auto* calibrate = app.add_subcommand("calibrate", "prefactors over the pref set");

  std::string mu_text;
  std::string mu_file;
  int solve_n = 0;
  bool solve_n_set = false;
  bool with_hf = false;
  solve->add_option("--mu", mu_text, "query parameter, comma separated");
  solve->add_option("--mu-file", mu_file, "JSON file holding the query parameter array");
  solve->add_option("--n", solve_n, "use the leading n basis columns")
      ->each([&](const std::string&) { solve_n_set = true; });
  solve->add_flag("--hf", with_hf, "also run the high-fidelity reference and print the error report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    romdiff::CliOverrides overrides;
    if (!out_dir.empty()) overrides.out_dir = out_dir;
    if (workers > 0) overrides.workers = workers;
    if (seed_set) overrides.seed = seed;
    const romdiff::RunConfig cfg = romdiff::load_run_config(config_path, overrides);

    if (samples->parsed()) {
      romdiff::cmd_samples(cfg, overwrite);
    } else if (snapshots->parsed()) {
      romdiff::cmd_snapshots(cfg, overwrite);
    } else if (build->parsed()) {
      romdiff::cmd_build(cfg, overwrite);
    } else if (solve->parsed()) {
      romdiff::SolveOptions options;
      if (!mu_text.empty()) {
        options.mu = parse_mu(mu_text);
      } else if (!mu_file.empty()) {
        options.mu = romdiff::parse_json_file(mu_file).get<std::vector<double>>();
      } else {
        throw romdiff::ConfigError("solve: one of --mu or --mu-file is required");
      }
      if (solve_n_set) options.n = solve_n;
      options.with_hf = with_hf;
      romdiff::cmd_solve(cfg, options);
    } else if (validate->parsed()) {
      romdiff::cmd_validate(cfg, overwrite);
    } else if (calibrate->parsed()) {
      romdiff::cmd_calibrate(cfg, overwrite);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return romdiff::exit_code_for(e);
  }
  return 0;
}
