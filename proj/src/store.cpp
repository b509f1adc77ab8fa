// SPDX-License-Identifier: Apache-2.0
#include "romdiff/store.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace romdiff {

namespace fs = std::filesystem;

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

std::string snapshot_file(const char* prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04zu.rmdf", prefix, index);
  return buf;
}

DenseMatrix row_vector(const std::vector<double>& v) {
  DenseMatrix m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return m;
}

}  // namespace

void write_rmdf(const fs::path& path, const DenseMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write("RMDF", 4);
  put_u32(out, kRmdfVersion);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  // column-major doubles; this build targets little-endian hosts
  static_assert(sizeof(double) == 8);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!out) throw IoError("short write on " + path.string());
}

DenseMatrix read_rmdf(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "RMDF", 4) != 0)
    throw FormatVersionError(path.string() + ": not an RMDF file");
  const std::uint32_t version = get_u32(in);
  if (version != kRmdfVersion)
    throw FormatVersionError(path.string() + ": unsupported RMDF version " +
                             std::to_string(version));
  const std::uint32_t rows = get_u32(in);
  const std::uint32_t cols = get_u32(in);
  DenseMatrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in) throw ChecksumError(path.string() + ": truncated payload");
  return m;
}

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

bool store_exists(const fs::path& dir) { return fs::exists(dir / "manifest.json"); }

namespace {

json load_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) throw IoError("store: missing manifest " + path.string());
  json manifest = parse_json_file(path);
  if (!manifest.contains("format_version") ||
      manifest["format_version"].get<std::uint32_t>() != kStoreVersion)
    throw FormatVersionError("store: unsupported manifest format in " + path.string());
  return manifest;
}

void write_manifest(const fs::path& dir, const json& manifest) {
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << "\n";
}

void verify_file(const fs::path& dir, const json& manifest, const std::string& name) {
  const fs::path path = dir / name;
  if (!fs::exists(path)) throw IoError("store: missing file " + path.string());
  const auto& sums = manifest.at("checksums");
  if (!sums.contains(name)) throw ChecksumError("store: no checksum recorded for " + name);
  const std::string expected = sums.at(name).get<std::string>();
  const std::string actual = file_checksum(path);
  if (expected != actual)
    throw ChecksumError("store: checksum mismatch for " + name + " (expected " + expected +
                        ", got " + actual + ")");
}

}  // namespace

void save_snapshots(const fs::path& dir, const Model& model, const SampleSet& train,
                    const EigSolveSettings& settings, const std::vector<Snapshot>& snapshots,
                    bool overwrite) {
  if (store_exists(dir) && !overwrite)
    throw IoError("store already exists at " + dir.string() + " (use --overwrite)");
  fs::create_directories(dir);

  json manifest;
  manifest["format_version"] = kStoreVersion;
  manifest["groups"] = model.groups;
  manifest["cells"] = model.geometry.cell_count();
  manifest["dim"] = model.map.dimension();
  manifest["config_hash"] = model.config_hash;
  manifest["train"] = {{"label", train.label}, {"seed", train.seed}, {"count", train.size()}};
  manifest["solver"] = {{"tol_u", settings.tol_u},
                        {"tol_k", settings.tol_k},
                        {"max_outer", settings.max_outer}};
  manifest["checksums"] = json::object();

  json list = json::array();
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const Snapshot& snap = snapshots[i];
    json entry;
    entry["mu"] = snap.mu;
    entry["converged"] = snap.converged;
    if (!snap.error.empty()) {
      entry["error"] = snap.error;
    } else {
      entry["k"] = snap.k;
      entry["iterations"] = {snap.iterations_direct, snap.iterations_adjoint};
      const std::string u_name = snapshot_file("u", i);
      const std::string us_name = snapshot_file("ustar", i);
      write_rmdf(dir / u_name, snap.u);
      write_rmdf(dir / us_name, snap.u_star);
      entry["u"] = u_name;
      entry["ustar"] = us_name;
      manifest["checksums"][u_name] = file_checksum(dir / u_name);
      manifest["checksums"][us_name] = file_checksum(dir / us_name);
    }
    list.push_back(std::move(entry));
  }
  manifest["snapshots"] = std::move(list);
  write_manifest(dir, manifest);
}

void save_basis(const fs::path& dir, const ReducedBasis& basis) {
  json manifest = load_manifest(dir);
  write_rmdf(dir / "basis_V.rmdf", basis.v);
  write_rmdf(dir / "sigma.rmdf", row_vector(basis.sigma_direct));
  write_rmdf(dir / "sigma_star.rmdf", row_vector(basis.sigma_adjoint));
  manifest["checksums"]["basis_V.rmdf"] = file_checksum(dir / "basis_V.rmdf");
  manifest["checksums"]["sigma.rmdf"] = file_checksum(dir / "sigma.rmdf");
  manifest["checksums"]["sigma_star.rmdf"] = file_checksum(dir / "sigma_star.rmdf");
  manifest["basis"] = {{"n", basis.rank()},
                       {"n_direct", basis.n_direct},
                       {"n_adjoint", basis.n_adjoint},
                       {"criterion", basis.criterion},
                       {"training_label", basis.training_label},
                       {"training_seed", basis.training_seed},
                       {"v", "basis_V.rmdf"},
                       {"sigma", "sigma.rmdf"},
                       {"sigma_star", "sigma_star.rmdf"}};
  write_manifest(dir, manifest);
}

Store load_store(const fs::path& dir, bool with_vectors) {
  const json manifest = load_manifest(dir);
  Store store;
  store.groups = manifest.at("groups").get<index_t>();
  store.cells = manifest.at("cells").get<index_t>();
  store.dim = manifest.at("dim").get<std::size_t>();
  store.config_hash = manifest.value("config_hash", "");
  store.provenance = {{"train", manifest.value("train", json::object())},
                      {"solver", manifest.value("solver", json::object())}};

  for (const auto& entry : manifest.at("snapshots")) {
    Snapshot snap;
    snap.mu = entry.at("mu").get<std::vector<double>>();
    snap.converged = entry.value("converged", false);
    if (entry.contains("error")) {
      snap.error = entry["error"].get<std::string>();
    } else {
      snap.k = entry.at("k").get<double>();
      const auto iters = entry.value("iterations", std::vector<int>{0, 0});
      snap.iterations_direct = iters.size() > 0 ? iters[0] : 0;
      snap.iterations_adjoint = iters.size() > 1 ? iters[1] : 0;
      if (with_vectors) {
        const std::string u_name = entry.at("u").get<std::string>();
        const std::string us_name = entry.at("ustar").get<std::string>();
        verify_file(dir, manifest, u_name);
        verify_file(dir, manifest, us_name);
        snap.u = read_rmdf(dir / u_name);
        snap.u_star = read_rmdf(dir / us_name);
      }
    }
    store.snapshots.push_back(std::move(snap));
  }

  if (manifest.contains("basis")) {
    const auto& b = manifest["basis"];
    ReducedBasis basis;
    basis.groups = store.groups;
    basis.cells = store.cells;
    basis.n_direct = b.at("n_direct").get<int>();
    basis.n_adjoint = b.at("n_adjoint").get<int>();
    basis.criterion = b.value("criterion", "");
    basis.training_label = b.value("training_label", "");
    basis.training_seed = b.value("training_seed", std::uint64_t{0});
    for (const char* name : {"basis_V.rmdf", "sigma.rmdf", "sigma_star.rmdf"})
      verify_file(dir, manifest, name);
    basis.v = read_rmdf(dir / "basis_V.rmdf");
    const DenseMatrix sigma = read_rmdf(dir / "sigma.rmdf");
    const DenseMatrix sigma_star = read_rmdf(dir / "sigma_star.rmdf");
    basis.sigma_direct.assign(sigma.data(), sigma.data() + sigma.size());
    basis.sigma_adjoint.assign(sigma_star.data(), sigma_star.data() + sigma_star.size());
    if (b.at("n").get<int>() != basis.rank())
      throw ChecksumError("store: basis rank disagrees with manifest");
    store.basis = std::move(basis);
  }
  return store;
}

}  // namespace romdiff
