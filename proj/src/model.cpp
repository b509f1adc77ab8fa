// SPDX-License-Identifier: Apache-2.0
#include "romdiff/model.hpp"

#include <algorithm>
#include <cmath>

namespace romdiff {

int Geometry::region_count() const {
  int m = 0;
  for (int r : region_of_cell) m = std::max(m, r);
  return m;
}

void Geometry::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (cells[a] < 1) throw ConfigError("geometry: cell counts must be >= 1");
    if (!(widths[a] > 0.0)) throw ConfigError("geometry: cell widths must be > 0");
  }
  if (region_of_cell.size() != static_cast<std::size_t>(cell_count()))
    throw ConfigError("geometry: region map must cover every cell");
  for (int r : region_of_cell)
    if (r < 1) throw ConfigError("geometry: region ids must be >= 1");
}

bool MaterialCrossSections::fissile() const {
  for (double v : nu_fission)
    if (v > 0.0) return true;
  return false;
}

void MaterialCrossSections::validate(const std::string& context) const {
  const int g = groups();
  if (g < 1) throw InvalidMaterialError(context + ": at least one energy group required");
  if (static_cast<int>(sigma_absorption.size()) != g || static_cast<int>(chi.size()) != g ||
      static_cast<int>(nu_fission.size()) != g || scatter.rows() != g || scatter.cols() != g)
    throw InvalidMaterialError(context + ": per-group arrays must all have G entries");
  double chi_sum = 0.0;
  for (int i = 0; i < g; ++i) {
    if (!(diffusion[i] > 0.0))
      throw InvalidMaterialError(context + ": diffusion coefficient must be > 0 in group " +
                                 std::to_string(i + 1));
    if (nu_fission[i] < 0.0)
      throw InvalidMaterialError(context + ": nu-fission must be >= 0 in group " +
                                 std::to_string(i + 1));
    if (chi[i] < 0.0)
      throw InvalidMaterialError(context + ": chi must be >= 0 in group " + std::to_string(i + 1));
    for (int j = 0; j < g; ++j)
      if (scatter(i, j) < 0.0)
        throw InvalidMaterialError(context + ": scattering cross-sections must be >= 0");
    // sigma_total >= out-scattering sum, i.e. absorption >= 0
    if (sigma_absorption[i] < 0.0)
      throw InvalidMaterialError(context + ": absorption must be >= 0 in group " +
                                 std::to_string(i + 1));
    chi_sum += chi[i];
  }
  if (fissile()) {
    if (std::abs(chi_sum - 1.0) > 1e-10)
      throw InvalidMaterialError(context + ": fission spectrum must sum to 1 for fissile material");
  } else if (chi_sum != 0.0 && std::abs(chi_sum - 1.0) > 1e-10) {
    throw InvalidMaterialError(context + ": fission spectrum must sum to 0 or 1");
  }
}

Vector OperatorPair::apply_a(const Vector& x) const {
  Vector y = Vector::Zero(size());
  for (index_t g = 0; g < groups; ++g)
    for (index_t gp = 0; gp < groups; ++gp) {
      const SparseMatrix& blk = a(g, gp);
      if (!blk.empty()) blk.apply_add(x.data() + gp * cells, y.data() + g * cells);
    }
  return y;
}

Vector OperatorPair::apply_b(const Vector& x) const {
  Vector y = Vector::Zero(size());
  for (index_t g = 0; g < groups; ++g)
    for (index_t gp = 0; gp < groups; ++gp) {
      const SparseMatrix& blk = b(g, gp);
      if (!blk.empty()) blk.apply_add(x.data() + gp * cells, y.data() + g * cells);
    }
  return y;
}

Vector OperatorPair::apply_a_transpose(const Vector& x) const {
  // (A^T)^{g,g'} = (A^{g',g})^T, so group g accumulates transpose-applies of
  // the blocks in block-column g.
  Vector y = Vector::Zero(size());
  for (index_t g = 0; g < groups; ++g)
    for (index_t gp = 0; gp < groups; ++gp) {
      const SparseMatrix& blk = a(gp, g);
      if (!blk.empty()) blk.apply_transpose_add(x.data() + gp * cells, y.data() + g * cells);
    }
  return y;
}

Vector OperatorPair::apply_b_transpose(const Vector& x) const {
  Vector y = Vector::Zero(size());
  for (index_t g = 0; g < groups; ++g)
    for (index_t gp = 0; gp < groups; ++gp) {
      const SparseMatrix& blk = b(gp, g);
      if (!blk.empty()) blk.apply_transpose_add(x.data() + gp * cells, y.data() + g * cells);
    }
  return y;
}

namespace {

SparseMatrix flatten_blocks(const std::vector<SparseMatrix>& blocks, index_t groups,
                            index_t cells) {
  const index_t n = groups * cells;
  std::vector<index_t> offsets(n + 1, 0);
  for (index_t g = 0; g < groups; ++g)
    for (index_t r = 0; r < cells; ++r) {
      index_t count = 0;
      for (index_t gp = 0; gp < groups; ++gp) {
        const SparseMatrix& blk = blocks[g * groups + gp];
        if (!blk.empty())
          count += blk.row_offsets()[r + 1] - blk.row_offsets()[r];
      }
      offsets[g * cells + r + 1] = offsets[g * cells + r] + count;
    }
  std::vector<index_t> cols(offsets[n]);
  std::vector<double> vals(offsets[n]);
  for (index_t g = 0; g < groups; ++g)
    for (index_t r = 0; r < cells; ++r) {
      index_t pos = offsets[g * cells + r];
      for (index_t gp = 0; gp < groups; ++gp) {
        const SparseMatrix& blk = blocks[g * groups + gp];
        if (blk.empty()) continue;
        for (index_t k = blk.row_offsets()[r]; k < blk.row_offsets()[r + 1]; ++k) {
          cols[pos] = gp * cells + blk.col_indices()[k];
          vals[pos] = blk.values()[k];
          ++pos;
        }
      }
    }
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace

SparseMatrix OperatorPair::assemble_full_a() const {
  return flatten_blocks(a_blocks, groups, cells);
}

SparseMatrix OperatorPair::assemble_full_b() const {
  return flatten_blocks(b_blocks, groups, cells);
}

OperatorPair assemble_operators(const Geometry& geometry,
                                const std::vector<MaterialCrossSections>& materials) {
  geometry.validate();
  const int region_count = geometry.region_count();
  if (static_cast<int>(materials.size()) < region_count)
    throw ConfigError("assemble: materials missing for some regions (need " +
                      std::to_string(region_count) + ")");
  const int g_count = materials.front().groups();
  for (std::size_t r = 0; r < materials.size(); ++r) {
    materials[r].validate("region " + std::to_string(r + 1));
    if (materials[r].groups() != g_count)
      throw InvalidMaterialError("assemble: all regions must share the group count");
  }

  const index_t nx = geometry.cells[0], ny = geometry.cells[1], nz = geometry.cells[2];
  const index_t n_cells = geometry.cell_count();
  const double volume = geometry.cell_volume();
  const std::array<double, 3> face_area{geometry.widths[1] * geometry.widths[2],
                                        geometry.widths[0] * geometry.widths[2],
                                        geometry.widths[0] * geometry.widths[1]};

  OperatorPair ops;
  ops.groups = g_count;
  ops.cells = n_cells;
  ops.a_blocks.resize(static_cast<std::size_t>(g_count) * g_count);
  ops.b_blocks.resize(static_cast<std::size_t>(g_count) * g_count);

  auto material_of = [&](index_t cell) -> const MaterialCrossSections& {
    return materials[geometry.region_of_cell[cell] - 1];
  };

  for (int g = 0; g < g_count; ++g) {
    SparseBuilder diag(n_cells, n_cells);
    for (index_t iz = 0; iz < nz; ++iz)
      for (index_t iy = 0; iy < ny; ++iy)
        for (index_t ix = 0; ix < nx; ++ix) {
          const index_t c = geometry.cell_index(ix, iy, iz);
          const MaterialCrossSections& mat = material_of(c);
          diag.add(c, c, mat.removal(g) * volume);

          const std::array<index_t, 3> idx{ix, iy, iz};
          for (int axis = 0; axis < 3; ++axis) {
            const double d_c = mat.diffusion[g];
            const double width = geometry.widths[axis];
            // interior face toward the +axis neighbor, counted once
            if (idx[axis] + 1 < geometry.cells[axis]) {
              index_t jx = ix, jy = iy, jz = iz;
              (axis == 0 ? jx : axis == 1 ? jy : jz) += 1;
              const index_t nbr = geometry.cell_index(jx, jy, jz);
              const double d_n = material_of(nbr).diffusion[g];
              const double coupling = face_area[axis] * (2.0 * d_c * d_n / (d_c + d_n)) / width;
              diag.add(c, c, coupling);
              diag.add(c, nbr, -coupling);
              diag.add(nbr, nbr, coupling);
              diag.add(nbr, c, -coupling);
            }
            // boundary faces
            if (idx[axis] == 0 &&
                geometry.boundary[2 * axis] == BoundaryCondition::vacuum)
              diag.add(c, c, face_area[axis] * d_c / (0.5 * width + 2.0 * d_c));
            if (idx[axis] + 1 == geometry.cells[axis] &&
                geometry.boundary[2 * axis + 1] == BoundaryCondition::vacuum)
              diag.add(c, c, face_area[axis] * d_c / (0.5 * width + 2.0 * d_c));
          }
        }
    ops.a_blocks[static_cast<std::size_t>(g) * g_count + g] = diag.build();
  }

  // off-diagonal A blocks hold the (negative) in-scattering couplings,
  // diagonal per cell
  for (int g = 0; g < g_count; ++g)
    for (int gp = 0; gp < g_count; ++gp) {
      if (gp == g) continue;
      bool any = false;
      for (const auto& mat : materials)
        if (mat.scatter(gp, g) != 0.0) any = true;
      if (!any) {
        ops.a_blocks[static_cast<std::size_t>(g) * g_count + gp] =
            SparseMatrix::zero(n_cells, n_cells);
        continue;
      }
      SparseBuilder blk(n_cells, n_cells);
      for (index_t c = 0; c < n_cells; ++c)
        blk.add(c, c, -material_of(c).scatter(gp, g) * volume);
      ops.a_blocks[static_cast<std::size_t>(g) * g_count + gp] = blk.build();
    }

  // fission production B^{g,g'} = chi^g (nu Sigma_f)^{g'} * volume
  for (int g = 0; g < g_count; ++g)
    for (int gp = 0; gp < g_count; ++gp) {
      bool any = false;
      for (const auto& mat : materials)
        if (mat.chi[g] * mat.nu_fission[gp] != 0.0) any = true;
      if (!any) {
        ops.b_blocks[static_cast<std::size_t>(g) * g_count + gp] =
            SparseMatrix::zero(n_cells, n_cells);
        continue;
      }
      SparseBuilder blk(n_cells, n_cells);
      for (index_t c = 0; c < n_cells; ++c) {
        const MaterialCrossSections& mat = material_of(c);
        const double v = mat.chi[g] * mat.nu_fission[gp] * volume;
        if (v != 0.0) blk.add(c, c, v);
      }
      ops.b_blocks[static_cast<std::size_t>(g) * g_count + gp] = blk.build();
    }

  return ops;
}

OperatorPair transpose_operators(const OperatorPair& ops) {
  OperatorPair out;
  out.groups = ops.groups;
  out.cells = ops.cells;
  out.a_blocks.resize(ops.a_blocks.size());
  out.b_blocks.resize(ops.b_blocks.size());
  for (index_t g = 0; g < ops.groups; ++g)
    for (index_t gp = 0; gp < ops.groups; ++gp) {
      out.a_blocks[g * ops.groups + gp] = ops.a(gp, g).transposed();
      out.b_blocks[g * ops.groups + gp] = ops.b(gp, g).transposed();
    }
  return out;
}

}  // namespace romdiff
