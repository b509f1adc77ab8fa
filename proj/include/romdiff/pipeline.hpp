// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>

#include "romdiff/online.hpp"
#include "romdiff/store.hpp"

namespace romdiff {

struct SampleSpec {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::optional<Box> bounds;  // defaults to the parameter map's bounds
  std::optional<std::pair<std::size_t, double>> pinned;
};

/// One run configuration document driving every subcommand.
struct RunConfig {
  std::filesystem::path config_path;
  std::filesystem::path model_path;
  std::filesystem::path store_dir;
  std::filesystem::path out_dir;
  TruncationCriterion truncation;
  EigSolveSettings hf_solver{1e-7, 1e-8, 500};
  EigSolveSettings reduced_solver{1e-8, 1e-9, 500};
  int workers = 1;
  std::vector<int> sweep;
  SampleSpec train;
  SampleSpec test;
  SampleSpec pref;

  std::filesystem::path samples_path(const std::string& label) const {
    return out_dir / ("samples_" + label + ".json");
  }
  std::filesystem::path prefactors_path() const { return out_dir / "prefactors.json"; }
};

struct CliOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;  // train = seed, test = seed+1, pref = seed+2
};

RunConfig load_run_config(const std::filesystem::path& path, const CliOverrides& overrides = {});

json sample_set_to_json(const SampleSet& set);
SampleSet sample_set_from_json(const json& doc);
SampleSet load_sample_set(const std::filesystem::path& path);

void cmd_samples(const RunConfig& cfg, bool overwrite);
void cmd_snapshots(const RunConfig& cfg, bool overwrite);
void cmd_build(const RunConfig& cfg, bool overwrite);

struct SolveOptions {
  std::vector<double> mu;
  std::optional<int> n;  // leading basis columns; defaults to the full rank
  bool with_hf = false;
};
void cmd_solve(const RunConfig& cfg, const SolveOptions& options);

void cmd_validate(const RunConfig& cfg, bool overwrite);
void cmd_calibrate(const RunConfig& cfg, bool overwrite);

/// Stable exit-code contract: 0 success, 2 config error, 3 numerical
/// failure, 4 I/O error.
int exit_code_for(const std::exception& e);

}  // namespace romdiff
