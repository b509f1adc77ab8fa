// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "romdiff/model.hpp"
#include "romdiff/sampling.hpp"

namespace romdiff {

/// One scaling action of a custom map: coefficient `quantity` of `region`
/// is multiplied (or divided) by parameter component `param`.
struct ScalingRule {
  enum class Quantity { absorption, diffusion, nu_fission, scatter };
  enum class Op { multiply, divide };

  int param = 0;        // 0-based index into mu
  int region = 1;       // 1-based region id
  Quantity quantity = Quantity::absorption;
  Op op = Op::multiply;
  int group = 0;        // 0-based; for scatter this is the source group
  int group_to = 0;     // 0-based destination group (scatter only)
};

/// Maps a parameter vector onto scaled per-region cross-sections.
/// Absorption is the scaled quantity; totals are reconstructed as
/// Sigma_t^g = Sigma_a^g + sum of out-scattering.
class ParameterMap {
 public:
  enum class Kind { takeda5, region_scaling9, custom };

  /// Five-parameter map: D^1 /= mu1, D^2 /= mu2, Sigma_a^1 *= mu1,
  /// Sigma_a^2 *= mu2, Sigma_s^{1->2} *= mu3, nuSigma_f^1 *= mu4,
  /// nuSigma_f^2 *= mu5, applied to every region. Requires G = 2.
  static ParameterMap takeda5(Box bounds);

  /// Nine-parameter map: mu_i is mapped affinely from its bounds onto a
  /// multiplier in multiplier_range applied to absorption and nu-fission of
  /// regions[i]. Other regions are untouched.
  static ParameterMap region_scaling9(Box bounds, std::array<double, 2> multiplier_range,
                                      std::vector<int> regions);

  static ParameterMap custom(Box bounds, std::vector<ScalingRule> rules);

  Kind kind() const { return kind_; }
  std::size_t dimension() const { return bounds_.dim(); }
  const Box& bounds() const { return bounds_; }
  bool contains(const std::vector<double>& mu) const { return bounds_.contains(mu); }

  /// Parameter value at which the map returns the nominal materials exactly.
  std::vector<double> reference_point() const;

  /// Scaled materials at mu. Throws DimensionError when len(mu) != d.
  /// Points outside the bounds are evaluated anyway (online queries may
  /// extrapolate); callers decide whether to warn.
  std::vector<MaterialCrossSections> evaluate(
      const std::vector<MaterialCrossSections>& nominal, const std::vector<double>& mu) const;

  std::string kind_name() const;

 private:
  double region_multiplier(std::size_t j, double mu_j) const;

  Kind kind_ = Kind::custom;
  Box bounds_;
  std::array<double, 2> multiplier_range_{0.9, 1.1};
  std::vector<int> regions_;
  std::vector<ScalingRule> rules_;
};

/// A geometry, its nominal materials, and the parameter-to-coefficient map.
struct Model {
  Geometry geometry;
  std::vector<MaterialCrossSections> materials;
  ParameterMap map;
  int groups = 0;
  std::string config_hash;  // canonical hash of the source document

  index_t dof_count() const { return groups * geometry.cell_count(); }
};

std::vector<MaterialCrossSections> evaluate_parameters(const Model& model,
                                                       const std::vector<double>& mu);

/// evaluate_parameters followed by assemble_operators.
OperatorPair assemble_at(const Model& model, const std::vector<double>& mu);

}  // namespace romdiff
