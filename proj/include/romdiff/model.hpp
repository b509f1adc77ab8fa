// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "romdiff/linalg.hpp"

namespace romdiff {

enum class BoundaryCondition { vacuum, reflective };

/// Box geometry on a structured cell-centered grid. Faces are indexed
/// x_lo, x_hi, y_lo, y_hi, z_lo, z_hi.
struct Geometry {
  std::array<index_t, 3> cells{1, 1, 1};     // nx, ny, nz
  std::array<double, 3> widths{1.0, 1.0, 1.0};  // cell widths, cm
  std::vector<int> region_of_cell;           // 1-based region ids, size nx*ny*nz
  std::array<BoundaryCondition, 6> boundary{
      BoundaryCondition::reflective, BoundaryCondition::reflective,
      BoundaryCondition::reflective, BoundaryCondition::reflective,
      BoundaryCondition::reflective, BoundaryCondition::reflective};

  index_t cell_count() const { return cells[0] * cells[1] * cells[2]; }
  index_t cell_index(index_t ix, index_t iy, index_t iz) const {
    return ix + cells[0] * (iy + cells[1] * iz);
  }
  double cell_volume() const { return widths[0] * widths[1] * widths[2]; }
  int region_count() const;
  void validate() const;
};

/// Per-region multigroup coefficients. scatter(from, to) holds the order-0
/// scattering cross-section from group `from` into group `to`. Absorption is
/// the stored quantity; totals are reconstructed as
/// Sigma_t^g = Sigma_a^g + sum_g' Sigma_s^{g->g'}, which keeps scaling the
/// absorption by exactly 1 a bitwise no-op.
struct MaterialCrossSections {
  std::vector<double> diffusion;         // D^g, cm
  std::vector<double> sigma_absorption;  // Sigma_a^g, 1/cm
  DenseMatrix scatter;                   // G x G, 1/cm
  std::vector<double> chi;               // fission spectrum, sums to 1 (or 0)
  std::vector<double> nu_fission;        // nu Sigma_f^g, 1/cm

  int groups() const { return static_cast<int>(diffusion.size()); }
  double sigma_total(int g) const { return sigma_absorption[g] + scatter.row(g).sum(); }
  /// Removal from group g: total minus in-group scattering.
  double removal(int g) const { return sigma_total(g) - scatter(g, g); }
  bool fissile() const;

  void validate(const std::string& context) const;
};

/// Block-sparse operators of the multigroup eigenproblem A u = (1/k) B u.
/// Block (g, g') is an N_R x N_R sparse matrix; the global ordering is
/// group-major (dof = g * N_R + cell).
struct OperatorPair {
  index_t groups = 0;  // G
  index_t cells = 0;   // N_R
  std::vector<SparseMatrix> a_blocks;  // row-major block index g*G + g'
  std::vector<SparseMatrix> b_blocks;

  index_t size() const { return groups * cells; }
  const SparseMatrix& a(index_t g, index_t gp) const { return a_blocks[g * groups + gp]; }
  const SparseMatrix& b(index_t g, index_t gp) const { return b_blocks[g * groups + gp]; }

  Vector apply_a(const Vector& x) const;
  Vector apply_b(const Vector& x) const;
  Vector apply_a_transpose(const Vector& x) const;
  Vector apply_b_transpose(const Vector& x) const;

  /// Flattens the block grid into one N x N CSR matrix.
  SparseMatrix assemble_full_a() const;
  SparseMatrix assemble_full_b() const;
};

/// Cell-centered finite-volume discretization. Face diffusion coupling uses
/// the harmonic mean of adjacent-cell D over the center distance times the
/// face area; vacuum faces add the Marshak closure D/(delta/2 + 2D) times
/// the face area; reflective faces add nothing.
OperatorPair assemble_operators(const Geometry& geometry,
                                const std::vector<MaterialCrossSections>& materials);

/// Blockwise transpose: (A^T)^{g,g'} = (A^{g',g})^T, same for B.
OperatorPair transpose_operators(const OperatorPair& ops);

}  // namespace romdiff
