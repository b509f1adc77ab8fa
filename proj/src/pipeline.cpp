// SPDX-License-Identifier: Apache-2.0
#include "romdiff/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>

namespace romdiff {

namespace fs = std::filesystem;

namespace {

void warn(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

fs::path resolve(const fs::path& base_dir, const fs::path& p) {
  return p.is_absolute() ? p : base_dir / p;
}

Box box_from_ranges(const json& node, const std::string& context) {
  if (!node.is_array() || node.empty())
    throw ConfigError(context + ": expected an array of [lo, hi] pairs");
  Box box;
  for (const auto& pair : node) {
    if (!pair.is_array() || pair.size() != 2)
      throw ConfigError(context + ": expected [lo, hi] pairs");
    box.ranges.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  box.validate();
  return box;
}

SampleSpec sample_spec_from_json(const json& node, const std::string& context) {
  require_keys(node, {"count", "seed", "bounds", "pinned"}, context);
  SampleSpec spec;
  if (!node.contains("count")) throw ConfigError(context + ": missing key 'count'");
  spec.count = node["count"].get<std::size_t>();
  if (!node.contains("seed")) throw ConfigError(context + ": missing key 'seed'");
  spec.seed = node["seed"].get<std::uint64_t>();
  if (node.contains("bounds")) spec.bounds = box_from_ranges(node["bounds"], context + ".bounds");
  if (node.contains("pinned")) {
    require_keys(node["pinned"], {"index", "value"}, context + ".pinned");
    spec.pinned = {node["pinned"].at("index").get<std::size_t>(),
                   node["pinned"].at("value").get<double>()};
  }
  return spec;
}

EigSolveSettings solver_from_json(const json& node, const EigSolveSettings& defaults,
                                  const std::string& context) {
  require_keys(node, {"tol_u", "tol_k", "max_outer"}, context);
  EigSolveSettings s = defaults;
  if (node.contains("tol_u")) s.tol_u = node["tol_u"].get<double>();
  if (node.contains("tol_k")) s.tol_k = node["tol_k"].get<double>();
  if (node.contains("max_outer")) s.max_outer = node["max_outer"].get<int>();
  s.validate();
  return s;
}

void require_absent_or_overwrite(const fs::path& path, bool overwrite) {
  if (fs::exists(path) && !overwrite)
    throw IoError(path.string() + " already exists (use --overwrite)");
}

Model load_model_checked(const RunConfig& cfg) { return load_model(cfg.model_path); }

void check_config_hash(const Model& model, const Store& store) {
  if (!store.config_hash.empty() && store.config_hash != model.config_hash)
    warn("store was built from a different model configuration (hash " + store.config_hash +
         " vs " + model.config_hash + ")");
}

Box bounds_for(const SampleSpec& spec, const Model& model) {
  return spec.bounds ? *spec.bounds : model.map.bounds();
}

SampleSet generate_set(const SampleSpec& spec, const Model& model, const std::string& label) {
  const Box bounds = bounds_for(spec, model);
  if (spec.pinned)
    return fixed_coordinate_sample(bounds, spec.count, spec.seed, spec.pinned->first,
                                   spec.pinned->second, label);
  return lhs_sample(bounds, spec.count, spec.seed, label);
}

std::vector<int> clamped_sweep(const RunConfig& cfg, int max_rank, const std::string& what) {
  std::vector<int> sweep = cfg.sweep;
  if (sweep.empty()) sweep.push_back(max_rank);
  std::vector<int> out;
  for (int n : sweep) {
    if (n < 1) throw ConfigError("sweep: ranks must be >= 1");
    if (n > max_rank) {
      warn("sweep rank " + std::to_string(n) + " exceeds " + what + " (" +
           std::to_string(max_rank) + "); clamped");
      n = max_rank;
    }
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  return out;
}

std::size_t usable_snapshot_count(const Store& store) {
  std::size_t count = 0;
  for (const auto& s : store.snapshots)
    if (s.usable()) ++count;
  return count;
}

struct PrefactorTable {
  std::map<int, Prefactors> by_rank;

  const Prefactors* find(int n) const {
    auto it = by_rank.find(n);
    return it == by_rank.end() ? nullptr : &it->second;
  }
};

PrefactorTable load_prefactors(const fs::path& path) {
  PrefactorTable table;
  const json doc = parse_json_file(path);
  for (const auto& [key, value] : doc.at("prefactors").items()) {
    Prefactors pf;
    pf.n = std::stoi(key);
    pf.c_u = value.at("C_u").get<double>();
    pf.c_ustar = value.at("C_ustar").get<double>();
    pf.c_k = value.at("C_k").get<double>();
    pf.label = doc.contains("pref") ? doc["pref"].value("label", "pref") : "pref";
    pf.sample_count = doc.contains("pref") ? doc["pref"].value("count", 0) : 0;
    table.by_rank[pf.n] = pf;
  }
  return table;
}

const std::vector<std::string> kReportColumns{
    "k_hf",   "k_rb",       "e_k",        "e_u",          "e_ustar",   "norm_R",
    "norm_Rstar", "eta_k",  "delta_u",    "delta_ustar",  "delta_k",   "t_assemble_s",
    "t_solve_s",  "t_hf_s"};

struct Row {
  std::vector<double> mu;
  int n = 0;
  std::vector<double> values;  // aligned with kReportColumns; NaN = unavailable
};

void write_csv(const fs::path& path, std::size_t dim, const std::vector<Row>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t j = 0; j < dim; ++j) out << "mu_" << j << ",";
  out << "n";
  for (const auto& col : kReportColumns) out << "," << col;
  out << "\n";
  for (const Row& row : rows) {
    for (double m : row.mu) out << fmt_double(m) << ",";
    out << row.n;
    for (double v : row.values) out << "," << fmt_double(v);
    out << "\n";
    out.flush();  // keep partial output usable on interrupt
  }
}

json summarize(const std::vector<Row>& rows, const std::vector<int>& sweep) {
  json per_n = json::array();
  for (int n : sweep) {
    json mean = json::object();
    json max = json::object();
    for (std::size_t c = 0; c < kReportColumns.size(); ++c) {
      double sum = 0.0, mx = 0.0;
      std::size_t count = 0;
      for (const Row& row : rows) {
        if (row.n != n) continue;
        const double v = row.values[c];
        if (std::isnan(v)) continue;
        sum += v;
        mx = count == 0 ? v : std::max(mx, v);
        ++count;
      }
      if (count == 0) {
        mean[kReportColumns[c]] = nullptr;
        max[kReportColumns[c]] = nullptr;
      } else {
        mean[kReportColumns[c]] = sum / static_cast<double>(count);
        max[kReportColumns[c]] = mx;
      }
    }
    per_n.push_back({{"n", n}, {"mean", std::move(mean)}, {"max", std::move(max)}});
  }
  return per_n;
}

Row make_row(const std::vector<double>& mu, int n, double k_hf, double k_rb,
             const ErrorReport& report, double t_assemble, double t_solve, double t_hf) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Row row;
  row.mu = mu;
  row.n = n;
  row.values = {k_hf,
                k_rb,
                report.e_k,
                report.e_u,
                report.e_ustar,
                report.norm_r,
                report.norm_rstar,
                report.eta_k.value_or(nan),
                report.delta_u.value_or(nan),
                report.delta_ustar.value_or(nan),
                report.delta_k.value_or(nan),
                t_assemble,
                t_solve,
                t_hf};
  return row;
}

}  // namespace

RunConfig load_run_config(const fs::path& path, const CliOverrides& overrides) {
  const json doc = parse_json_file(path);
  require_keys(doc,
               {"model", "store", "output", "truncation", "hf_solver", "reduced_solver",
                "workers", "sweep", "samples"},
               "run config");
  RunConfig cfg;
  cfg.config_path = path;
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");

  if (!doc.contains("model")) throw ConfigError("run config: missing key 'model'");
  cfg.model_path = resolve(base, doc["model"].get<std::string>());
  if (!doc.contains("store")) throw ConfigError("run config: missing key 'store'");
  cfg.store_dir = resolve(base, doc["store"].get<std::string>());
  cfg.out_dir = resolve(base, doc.value("output", "out"));

  if (doc.contains("truncation")) {
    const auto& t = doc["truncation"];
    require_keys(t, {"epsilon", "rank", "max_rank"}, "run config.truncation");
    if (t.contains("rank")) cfg.truncation.rank = t["rank"].get<int>();
    if (t.contains("epsilon")) cfg.truncation.epsilon = t["epsilon"].get<double>();
    if (t.contains("max_rank")) cfg.truncation.max_rank = t["max_rank"].get<int>();
  }
  if (doc.contains("hf_solver"))
    cfg.hf_solver = solver_from_json(doc["hf_solver"], cfg.hf_solver, "run config.hf_solver");
  if (doc.contains("reduced_solver"))
    cfg.reduced_solver =
        solver_from_json(doc["reduced_solver"], cfg.reduced_solver, "run config.reduced_solver");
  if (doc.contains("workers")) cfg.workers = doc["workers"].get<int>();
  if (doc.contains("sweep")) {
    for (const auto& n : doc["sweep"]) cfg.sweep.push_back(n.get<int>());
  }

  if (!doc.contains("samples")) throw ConfigError("run config: missing key 'samples'");
  require_keys(doc["samples"], {"train", "test", "pref"}, "run config.samples");
  if (!doc["samples"].contains("train"))
    throw ConfigError("run config.samples: missing key 'train'");
  cfg.train = sample_spec_from_json(doc["samples"]["train"], "run config.samples.train");
  if (doc["samples"].contains("test"))
    cfg.test = sample_spec_from_json(doc["samples"]["test"], "run config.samples.test");
  if (doc["samples"].contains("pref"))
    cfg.pref = sample_spec_from_json(doc["samples"]["pref"], "run config.samples.pref");

  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.workers) cfg.workers = *overrides.workers;
  if (overrides.seed) {
    cfg.train.seed = *overrides.seed;
    cfg.test.seed = *overrides.seed + 1;
    cfg.pref.seed = *overrides.seed + 2;
  }

  if (cfg.workers < 1) throw ConfigError("run config: workers must be >= 1");
  if (cfg.model_path == cfg.store_dir || cfg.model_path == cfg.out_dir)
    throw ConfigError("run config: model, store and output paths must be distinct");
  return cfg;
}

json sample_set_to_json(const SampleSet& set) {
  json bounds = json::array();
  for (const auto& [lo, hi] : set.bounds.ranges) bounds.push_back({lo, hi});
  return {{"label", set.label}, {"seed", set.seed}, {"bounds", std::move(bounds)},
          {"points", set.points}};
}

SampleSet sample_set_from_json(const json& doc) {
  require_keys(doc, {"label", "seed", "bounds", "points"}, "sample set");
  SampleSet set;
  set.label = doc.at("label").get<std::string>();
  set.seed = doc.at("seed").get<std::uint64_t>();
  set.bounds = box_from_ranges(doc.at("bounds"), "sample set.bounds");
  for (const auto& p : doc.at("points")) set.points.push_back(p.get<std::vector<double>>());
  for (const auto& p : set.points)
    if (p.size() != set.bounds.dim())
      throw ConfigError("sample set: point dimension disagrees with bounds");
  return set;
}

SampleSet load_sample_set(const fs::path& path) {
  if (!fs::exists(path))
    throw IoError("sample file " + path.string() + " not found (run the samples command first)");
  return sample_set_from_json(parse_json_file(path));
}

void cmd_samples(const RunConfig& cfg, bool overwrite) {
  const Model model = load_model_checked(cfg);
  fs::create_directories(cfg.out_dir);

  SampleSet train = generate_set(cfg.train, model, "train");
  SampleSet test = cfg.test.count > 0 ? generate_set(cfg.test, model, "test") : SampleSet{};
  SampleSet pref = cfg.pref.count > 0 ? generate_set(cfg.pref, model, "pref") : SampleSet{};
  if (cfg.test.count > 0) test = make_disjoint(std::move(test), {&train}, cfg.test.pinned);
  if (cfg.pref.count > 0)
    pref = make_disjoint(std::move(pref), {&train, &test}, cfg.pref.pinned);

  for (const SampleSet* set : {&train, &test, &pref}) {
    if (set->label.empty()) continue;
    const fs::path path = cfg.samples_path(set->label);
    require_absent_or_overwrite(path, overwrite);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << sample_set_to_json(*set).dump(2) << "\n";
    std::cout << set->label << ": " << set->size() << " points (seed " << set->seed << ") -> "
              << path.string() << "\n";
  }
}

void cmd_snapshots(const RunConfig& cfg, bool overwrite) {
  const Model model = load_model_checked(cfg);
  const SampleSet train = load_sample_set(cfg.samples_path("train"));
  if (train.points.empty()) throw EmptySetError("snapshots: training set is empty");
  if (store_exists(cfg.store_dir) && !overwrite)
    throw IoError("store already exists at " + cfg.store_dir.string() + " (use --overwrite)");

  std::cout << "solving " << train.size() << " high-fidelity direct+adjoint pairs ("
            << cfg.workers << " workers)\n";
  const std::vector<Snapshot> snapshots =
      generate_snapshots(model, train, cfg.hf_solver, cfg.workers, warn);
  save_snapshots(cfg.store_dir, model, train, cfg.hf_solver, snapshots, overwrite);

  std::size_t converged = 0;
  double iteration_sum = 0.0;
  for (const Snapshot& s : snapshots)
    if (s.usable()) {
      ++converged;
      iteration_sum += 0.5 * (s.iterations_direct + s.iterations_adjoint);
    }
  std::cout << "converged " << converged << "/" << snapshots.size() << ", mean outer iterations "
            << (converged ? iteration_sum / static_cast<double>(converged) : 0.0) << "\n";
  std::cout << "store written to " << cfg.store_dir.string() << "\n";
}

void cmd_build(const RunConfig& cfg, bool overwrite) {
  const Model model = load_model_checked(cfg);
  Store store = load_store(cfg.store_dir, /*with_vectors=*/true);
  check_config_hash(model, store);
  if (store.basis && !overwrite)
    throw IoError("store already holds a basis (use --overwrite)");

  ReducedBasis basis = build_reduced_basis(store.snapshots, cfg.truncation, store.groups,
                                           store.cells);
  basis.training_label = store.provenance["train"].value("label", "train");
  basis.training_seed = store.provenance["train"].value("seed", std::uint64_t{0});
  save_basis(cfg.store_dir, basis);

  fs::create_directories(cfg.out_dir);
  const fs::path csv_path = cfg.out_dir / "singular_values.csv";
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  csv << "index,sigma_direct,sigma_adjoint\n";
  const std::size_t count = std::max(basis.sigma_direct.size(), basis.sigma_adjoint.size());
  for (std::size_t i = 0; i < count; ++i) {
    csv << (i + 1) << ",";
    if (i < basis.sigma_direct.size()) csv << fmt_double(basis.sigma_direct[i]);
    csv << ",";
    if (i < basis.sigma_adjoint.size()) csv << fmt_double(basis.sigma_adjoint[i]);
    csv << "\n";
  }
  std::cout << "basis rank n = " << basis.rank() << " (n_direct = " << basis.n_direct
            << ", n_adjoint = " << basis.n_adjoint << ", " << basis.criterion << ")\n";
  std::cout << "singular values -> " << csv_path.string() << "\n";
}

void cmd_solve(const RunConfig& cfg, const SolveOptions& options) {
  const Model model = load_model_checked(cfg);
  const Store store = load_store(cfg.store_dir, /*with_vectors=*/false);
  check_config_hash(model, store);
  if (!store.basis) throw IoError("store has no basis; run the build command first");
  const ReducedBasis& basis = *store.basis;

  if (options.mu.size() != model.map.dimension())
    throw DimensionError("solve: mu has " + std::to_string(options.mu.size()) +
                         " components, model expects " + std::to_string(model.map.dimension()));
  if (!model.map.contains(options.mu))
    warn("extrapolation: mu lies outside the parameter bounds");

  int n = options.n.value_or(basis.rank());
  if (n > basis.rank()) {
    warn("requested n " + std::to_string(n) + " exceeds basis rank; clamped to " +
         std::to_string(basis.rank()));
    n = basis.rank();
  }
  if (n < 1) throw ConfigError("solve: n must be >= 1");

  const OperatorPair ops = assemble_at(model, options.mu);
  const ReducedOperators red = assemble_reduced(basis, ops, options.mu, n);
  const ReducedSolution sol = solve_reduced(red, basis.v.leftCols(n), cfg.reduced_solver);

  std::cout << "n = " << n << "\n";
  std::cout << "k_rb = " << fmt_double(sol.k)
            << (sol.converged ? "" : "  (reduced solve NOT converged)") << "\n";
  std::cout << "t_assemble_s = " << fmt_double(red.t_assemble_s)
            << ", t_solve_s = " << fmt_double(sol.t_solve_s) << "\n";

  if (options.with_hf) {
    const auto t0 = std::chrono::steady_clock::now();
    const EigSolution hf_direct = solve_direct(ops, cfg.hf_solver);
    const double t_hf = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const EigSolution hf_adjoint = solve_adjoint(ops, cfg.hf_solver);
    ErrorReport report = build_error_report(ops, red, sol, hf_direct, hf_adjoint);
    if (fs::exists(cfg.prefactors_path())) {
      const PrefactorTable table = load_prefactors(cfg.prefactors_path());
      if (const Prefactors* pf = table.find(n); pf != nullptr && report.eta_k) {
        const auto [du, dus, dk] =
            certified_estimates(*pf, n, report.norm_r, report.norm_rstar, *report.eta_k);
        report.delta_u = du;
        report.delta_ustar = dus;
        report.delta_k = dk;
      }
    }
    const Row row =
        make_row(options.mu, n, hf_direct.k, sol.k, report, red.t_assemble_s, sol.t_solve_s, t_hf);
    for (std::size_t j = 0; j < row.mu.size(); ++j) std::cout << "mu_" << j << ",";
    std::cout << "n";
    for (const auto& col : kReportColumns) std::cout << "," << col;
    std::cout << "\n";
    for (double m : row.mu) std::cout << fmt_double(m) << ",";
    std::cout << row.n;
    for (double v : row.values) std::cout << "," << fmt_double(v);
    std::cout << "\n";
  }
}

void cmd_validate(const RunConfig& cfg, bool overwrite) {
  const Model model = load_model_checked(cfg);
  const Store store = load_store(cfg.store_dir, /*with_vectors=*/true);
  check_config_hash(model, store);
  if (!store.basis) throw IoError("store has no basis; run the build command first");

  const SampleSet test = load_sample_set(cfg.samples_path("test"));
  if (test.points.empty()) throw EmptySetError("validate: test set is empty");
  // the sweep value n truncates both PODs at rank n and re-unions, so it is
  // capped by the number of usable snapshots
  const auto max_n = static_cast<int>(usable_snapshot_count(store));
  const std::vector<int> sweep = clamped_sweep(cfg, max_n, "usable snapshot count");

  PrefactorTable prefactors;
  bool have_prefactors = false;
  if (fs::exists(cfg.prefactors_path())) {
    prefactors = load_prefactors(cfg.prefactors_path());
    have_prefactors = true;
  }

  fs::create_directories(cfg.out_dir);
  const fs::path csv_path = cfg.out_dir / "errors.csv";
  const fs::path summary_path = cfg.out_dir / "summary.json";
  require_absent_or_overwrite(csv_path, overwrite);
  require_absent_or_overwrite(summary_path, overwrite);

  std::cout << "reference high-fidelity solves over " << test.size() << " test points ("
            << cfg.workers << " workers)\n";
  const std::vector<Snapshot> hf = generate_snapshots(model, test, cfg.hf_solver, cfg.workers, warn);

  // operators are reused across the whole rank sweep
  std::vector<OperatorPair> ops(test.size());
  parallel_for(test.size(), cfg.workers, [&](std::size_t i) {
    if (hf[i].usable()) ops[i] = assemble_at(model, test.points[i]);
  });

  std::vector<Row> rows;
  for (int n : sweep) {
    TruncationCriterion rank_n;
    rank_n.rank = n;
    const ReducedBasis basis =
        build_reduced_basis(store.snapshots, rank_n, store.groups, store.cells);
    const Prefactors* pf = have_prefactors ? prefactors.find(n) : nullptr;
    if (have_prefactors && pf == nullptr)
      warn("no prefactors recorded for n = " + std::to_string(n));
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (!hf[i].usable()) {
        warn("skipping test point " + std::to_string(i) + " (high-fidelity solve failed)");
        continue;
      }
      const ReducedOperators red = assemble_reduced(basis, ops[i], test.points[i], basis.rank());
      const ReducedSolution sol = solve_reduced(red, basis.v, cfg.reduced_solver);
      EigSolution hf_direct;
      hf_direct.u = hf[i].u;
      hf_direct.k = hf[i].k;
      EigSolution hf_adjoint;
      hf_adjoint.u = hf[i].u_star;
      hf_adjoint.k = hf[i].k;
      ErrorReport report = build_error_report(ops[i], red, sol, hf_direct, hf_adjoint);
      if (pf != nullptr && report.eta_k) {
        const auto [du, dus, dk] =
            certified_estimates(*pf, n, report.norm_r, report.norm_rstar, *report.eta_k);
        report.delta_u = du;
        report.delta_ustar = dus;
        report.delta_k = dk;
      }
      rows.push_back(make_row(test.points[i], n, hf[i].k, sol.k, report, red.t_assemble_s,
                              sol.t_solve_s, hf[i].t_direct_s));
    }
  }

  write_csv(csv_path, test.dim(), rows);
  json summary;
  summary["test"] = {{"label", test.label}, {"seed", test.seed}, {"count", test.size()}};
  summary["sweep"] = sweep;
  summary["per_n"] = summarize(rows, sweep);
  std::ofstream out(summary_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + summary_path.string());
  out << summary.dump(2) << "\n";
  std::cout << rows.size() << " rows -> " << csv_path.string() << "\n";
  std::cout << "summary -> " << summary_path.string() << "\n";
}

void cmd_calibrate(const RunConfig& cfg, bool overwrite) {
  const Model model = load_model_checked(cfg);
  const Store store = load_store(cfg.store_dir, /*with_vectors=*/true);
  check_config_hash(model, store);
  if (!store.basis) throw IoError("store has no basis; run the build command first");

  const SampleSet pref = load_sample_set(cfg.samples_path("pref"));
  if (pref.points.empty()) throw EmptySetError("calibrate: prefactor set is empty");
  const SampleSet train = load_sample_set(cfg.samples_path("train"));
  if (intersects(pref, train))
    throw ConfigError("calibrate: prefactor set intersects the training set");

  const auto max_n = static_cast<int>(usable_snapshot_count(store));
  const std::vector<int> sweep = clamped_sweep(cfg, max_n, "usable snapshot count");
  require_absent_or_overwrite(cfg.prefactors_path(), overwrite);

  std::cout << "prefactor high-fidelity solves over " << pref.size() << " points ("
            << cfg.workers << " workers)\n";
  const std::vector<Snapshot> hf = generate_snapshots(model, pref, cfg.hf_solver, cfg.workers, warn);

  std::vector<OperatorPair> ops(pref.size());
  parallel_for(pref.size(), cfg.workers, [&](std::size_t i) {
    if (hf[i].usable()) ops[i] = assemble_at(model, pref.points[i]);
  });

  json table = json::object();
  for (int n : sweep) {
    TruncationCriterion rank_n;
    rank_n.rank = n;
    const ReducedBasis basis =
        build_reduced_basis(store.snapshots, rank_n, store.groups, store.cells);
    std::vector<ErrorReport> reports;
    for (std::size_t i = 0; i < pref.size(); ++i) {
      if (!hf[i].usable()) {
        warn("skipping pref point " + std::to_string(i) + " (high-fidelity solve failed)");
        continue;
      }
      const ReducedOperators red = assemble_reduced(basis, ops[i], pref.points[i], basis.rank());
      const ReducedSolution sol = solve_reduced(red, basis.v, cfg.reduced_solver);
      EigSolution hf_direct;
      hf_direct.u = hf[i].u;
      hf_direct.k = hf[i].k;
      EigSolution hf_adjoint;
      hf_adjoint.u = hf[i].u_star;
      hf_adjoint.k = hf[i].k;
      reports.push_back(build_error_report(ops[i], red, sol, hf_direct, hf_adjoint));
    }
    const Prefactors pf = prefactors_from_reports(reports, n, pref.label, warn);
    table[std::to_string(n)] = {{"C_u", pf.c_u}, {"C_ustar", pf.c_ustar}, {"C_k", pf.c_k}};
    std::cout << "n = " << n << ": C_u = " << fmt_double(pf.c_u)
              << ", C_ustar = " << fmt_double(pf.c_ustar) << ", C_k = " << fmt_double(pf.c_k)
              << "\n";
  }

  fs::create_directories(cfg.out_dir);
  json doc;
  doc["basis_rank"] = store.basis->rank();
  doc["pref"] = {{"label", pref.label}, {"seed", pref.seed}, {"count", pref.size()}};
  doc["prefactors"] = std::move(table);
  std::ofstream out(cfg.prefactors_path(), std::ios::trunc);
  if (!out) throw IoError("cannot write " + cfg.prefactors_path().string());
  out << doc.dump(2) << "\n";
  std::cout << "prefactors -> " << cfg.prefactors_path().string() << "\n";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return 2;
  if (dynamic_cast<const IoError*>(&e) != nullptr) return 4;
  if (dynamic_cast<const Error*>(&e) != nullptr) return 3;
  if (dynamic_cast<const json::exception*>(&e) != nullptr) return 2;
  return 3;
}

}  // namespace romdiff
