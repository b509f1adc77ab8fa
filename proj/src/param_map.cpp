// SPDX-License-Identifier: Apache-2.0
#include "romdiff/param_map.hpp"

#include <cmath>

namespace romdiff {

ParameterMap ParameterMap::takeda5(Box bounds) {
  bounds.validate();
  if (bounds.dim() != 5) throw ConfigError("takeda5 map: bounds must have dimension 5");
  ParameterMap m;
  m.kind_ = Kind::takeda5;
  m.bounds_ = std::move(bounds);
  return m;
}

ParameterMap ParameterMap::region_scaling9(Box bounds, std::array<double, 2> multiplier_range,
                                           std::vector<int> regions) {
  bounds.validate();
  if (bounds.dim() != 9) throw ConfigError("region_scaling9 map: bounds must have dimension 9");
  if (regions.size() != 9)
    throw ConfigError("region_scaling9 map: exactly 9 region ids required");
  if (!(multiplier_range[0] > 0.0 && multiplier_range[0] < multiplier_range[1]))
    throw ConfigError("region_scaling9 map: multiplier range must be positive and increasing");
  ParameterMap m;
  m.kind_ = Kind::region_scaling9;
  m.bounds_ = std::move(bounds);
  m.multiplier_range_ = multiplier_range;
  m.regions_ = std::move(regions);
  return m;
}

ParameterMap ParameterMap::custom(Box bounds, std::vector<ScalingRule> rules) {
  bounds.validate();
  ParameterMap m;
  m.kind_ = Kind::custom;
  m.bounds_ = std::move(bounds);
  m.rules_ = std::move(rules);
  for (const ScalingRule& r : m.rules_) {
    if (r.param < 0 || static_cast<std::size_t>(r.param) >= m.bounds_.dim())
      throw ConfigError("custom map: rule parameter index out of range");
    if (r.region < 1) throw ConfigError("custom map: rule region id must be >= 1");
  }
  return m;
}

std::string ParameterMap::kind_name() const {
  switch (kind_) {
    case Kind::takeda5: return "takeda5";
    case Kind::region_scaling9: return "region_scaling9";
    case Kind::custom: return "custom";
  }
  return "custom";
}

std::vector<double> ParameterMap::reference_point() const {
  std::vector<double> mu(dimension(), 1.0);
  if (kind_ == Kind::region_scaling9) {
    // multiplier equals 1 at the preimage of 1 under the affine map
    const double t = (1.0 - multiplier_range_[0]) / (multiplier_range_[1] - multiplier_range_[0]);
    for (std::size_t j = 0; j < 9; ++j) {
      const auto& [lo, hi] = bounds_.ranges[j];
      mu[j] = lo + t * (hi - lo);
    }
  }
  return mu;
}

double ParameterMap::region_multiplier(std::size_t j, double mu_j) const {
  // anchored at the reference coordinate so the reference point scales by
  // exactly 1.0 (a bitwise no-op on the materials)
  const auto& [lo, hi] = bounds_.ranges[j];
  const double t_ref =
      (1.0 - multiplier_range_[0]) / (multiplier_range_[1] - multiplier_range_[0]);
  const double ref = lo + t_ref * (hi - lo);
  const double slope = (multiplier_range_[1] - multiplier_range_[0]) / (hi - lo);
  return 1.0 + (mu_j - ref) * slope;
}

std::vector<MaterialCrossSections> ParameterMap::evaluate(
    const std::vector<MaterialCrossSections>& nominal, const std::vector<double>& mu) const {
  if (mu.size() != dimension())
    throw DimensionError("parameter map: expected " + std::to_string(dimension()) +
                         " components, got " + std::to_string(mu.size()));

  std::vector<MaterialCrossSections> out;
  out.reserve(nominal.size());

  switch (kind_) {
    case Kind::takeda5: {
      for (const auto& nominal_mat : nominal) {
        if (nominal_mat.groups() != 2)
          throw ConfigError("takeda5 map: requires G = 2 materials");
        MaterialCrossSections m = nominal_mat;
        m.diffusion[0] /= mu[0];
        m.diffusion[1] /= mu[1];
        m.sigma_absorption[0] *= mu[0];
        m.sigma_absorption[1] *= mu[1];
        m.scatter(0, 1) *= mu[2];
        m.nu_fission[0] *= mu[3];
        m.nu_fission[1] *= mu[4];
        out.push_back(std::move(m));
      }
      break;
    }
    case Kind::region_scaling9: {
      out = nominal;
      for (std::size_t j = 0; j < 9; ++j) {
        const double factor = region_multiplier(j, mu[j]);
        const std::size_t region = static_cast<std::size_t>(regions_[j]);
        if (region > out.size()) continue;  // region not present in this model
        MaterialCrossSections& m = out[region - 1];
        for (int g = 0; g < m.groups(); ++g) {
          m.sigma_absorption[g] *= factor;
          m.nu_fission[g] *= factor;
        }
      }
      break;
    }
    case Kind::custom: {
      out = nominal;
      for (const ScalingRule& r : rules_) {
        if (static_cast<std::size_t>(r.region) > out.size())
          throw ConfigError("custom map: rule references region " + std::to_string(r.region) +
                            " which has no material");
        const double factor =
            r.op == ScalingRule::Op::multiply ? mu[r.param] : 1.0 / mu[r.param];
        MaterialCrossSections& m = out[r.region - 1];
        const int g_count = m.groups();
        if (r.group < 0 || r.group >= g_count)
          throw ConfigError("custom map: rule group index out of range");
        switch (r.quantity) {
          case ScalingRule::Quantity::absorption: m.sigma_absorption[r.group] *= factor; break;
          case ScalingRule::Quantity::diffusion: m.diffusion[r.group] *= factor; break;
          case ScalingRule::Quantity::nu_fission: m.nu_fission[r.group] *= factor; break;
          case ScalingRule::Quantity::scatter:
            if (r.group_to < 0 || r.group_to >= g_count)
              throw ConfigError("custom map: rule destination group out of range");
            m.scatter(r.group, r.group_to) *= factor;
            break;
        }
      }
      break;
    }
  }
  return out;
}

std::vector<MaterialCrossSections> evaluate_parameters(const Model& model,
                                                       const std::vector<double>& mu) {
  return model.map.evaluate(model.materials, mu);
}

OperatorPair assemble_at(const Model& model, const std::vector<double>& mu) {
  return assemble_operators(model.geometry, evaluate_parameters(model, mu));
}

}  // namespace romdiff
