// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>

#include "romdiff/config.hpp"
#include "romdiff/offline.hpp"

namespace romdiff {

// RMDF matrix file: 16-byte header (magic "RMDF", format version u32,
// rows u32, cols u32, little-endian) followed by rows*cols IEEE-754 float64
// values, column-major, little-endian.
inline constexpr std::uint32_t kRmdfVersion = 1;

void write_rmdf(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix read_rmdf(const std::filesystem::path& path);

/// Checksum of a file's full contents, as stored in the manifest.
std::string file_checksum(const std::filesystem::path& path);

/// Snapshot/basis store: a directory with manifest.json plus RMDF payloads
/// u_####.rmdf, ustar_####.rmdf, basis_V.rmdf, sigma.rmdf, sigma_star.rmdf.
/// The manifest carries provenance and per-file checksums, never timings.
inline constexpr std::uint32_t kStoreVersion = 1;

struct Store {
  index_t groups = 0;
  index_t cells = 0;
  std::size_t dim = 0;             // parameter dimension
  std::string config_hash;
  json provenance;                 // train-set label/seed/count, solver settings
  std::vector<Snapshot> snapshots;
  std::optional<ReducedBasis> basis;
};

bool store_exists(const std::filesystem::path& dir);

/// Writes manifest + snapshot payloads. Refuses to overwrite an existing
/// store unless overwrite is set.
void save_snapshots(const std::filesystem::path& dir, const Model& model,
                    const SampleSet& train, const EigSolveSettings& settings,
                    const std::vector<Snapshot>& snapshots, bool overwrite);

/// Adds (or replaces) the basis payloads of an existing store.
void save_basis(const std::filesystem::path& dir, const ReducedBasis& basis);

/// Loads and checksum-verifies the store. When with_vectors is false only
/// the manifest metadata is populated.
Store load_store(const std::filesystem::path& dir, bool with_vectors = true);

}  // namespace romdiff
