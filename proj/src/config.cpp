// SPDX-License-Identifier: Apache-2.0
#include "romdiff/config.hpp"

#include <algorithm>
#include <fstream>

namespace romdiff {

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const void* data, std::size_t size) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data, size);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string canonical_hash(const json& doc) {
  const std::string text = doc.dump();  // nlohmann objects iterate key-sorted
  return fnv1a64_hex(text.data(), text.size());
}

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void require_keys(const json& object, const std::vector<std::string>& allowed,
                  const std::string& context) {
  if (!object.is_object()) throw ConfigError(context + ": expected an object");
  for (const auto& [key, value] : object.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

namespace {

const json& require(const json& object, const std::string& key, const std::string& context) {
  auto it = object.find(key);
  if (it == object.end()) throw ConfigError(context + ": missing key '" + key + "'");
  return *it;
}

std::vector<double> double_array(const json& node, std::size_t size, const std::string& context) {
  if (!node.is_array() || node.size() != size)
    throw ConfigError(context + ": expected an array of " + std::to_string(size) + " numbers");
  std::vector<double> out;
  out.reserve(size);
  for (const auto& v : node) {
    if (!v.is_number()) throw ConfigError(context + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Box box_from_json(const json& node, const std::string& context) {
  if (!node.is_array() || node.empty())
    throw ConfigError(context + ": expected a non-empty array of [lo, hi] pairs");
  Box box;
  for (std::size_t j = 0; j < node.size(); ++j) {
    const auto pair = double_array(node[j], 2, context + "[" + std::to_string(j) + "]");
    box.ranges.emplace_back(pair[0], pair[1]);
  }
  box.validate();
  return box;
}

BoundaryCondition boundary_from_string(const std::string& s, const std::string& context) {
  if (s == "vacuum") return BoundaryCondition::vacuum;
  if (s == "reflective") return BoundaryCondition::reflective;
  throw ConfigError(context + ": boundary must be 'vacuum' or 'reflective', got '" + s + "'");
}

Geometry geometry_from_json(const json& node) {
  require_keys(node, {"cells", "widths_cm", "region_grid", "boundary"}, "geometry");
  Geometry geom;
  const auto cells = require(node, "cells", "geometry");
  if (!cells.is_array() || cells.size() != 3)
    throw ConfigError("geometry.cells: expected [nx, ny, nz]");
  for (int a = 0; a < 3; ++a) geom.cells[a] = cells[a].get<index_t>();
  const auto widths = double_array(require(node, "widths_cm", "geometry"), 3, "geometry.widths_cm");
  for (int a = 0; a < 3; ++a) geom.widths[a] = widths[a];

  const auto& grid = require(node, "region_grid", "geometry");
  require_keys(grid, {"default", "boxes"}, "geometry.region_grid");
  const int default_region = require(grid, "default", "geometry.region_grid").get<int>();
  geom.region_of_cell.assign(geom.cell_count(), default_region);
  if (grid.contains("boxes")) {
    for (std::size_t b = 0; b < grid["boxes"].size(); ++b) {
      const std::string ctx = "geometry.region_grid.boxes[" + std::to_string(b) + "]";
      const auto& box = grid["boxes"][b];
      require_keys(box, {"region", "x_cm", "y_cm", "z_cm"}, ctx);
      const int region = require(box, "region", ctx).get<int>();
      const auto xr = double_array(require(box, "x_cm", ctx), 2, ctx + ".x_cm");
      const auto yr = double_array(require(box, "y_cm", ctx), 2, ctx + ".y_cm");
      const auto zr = double_array(require(box, "z_cm", ctx), 2, ctx + ".z_cm");
      // a cell belongs to the box when its center does; boxes are applied in
      // order, later boxes override earlier ones
      for (index_t iz = 0; iz < geom.cells[2]; ++iz)
        for (index_t iy = 0; iy < geom.cells[1]; ++iy)
          for (index_t ix = 0; ix < geom.cells[0]; ++ix) {
            const double x = (ix + 0.5) * geom.widths[0];
            const double y = (iy + 0.5) * geom.widths[1];
            const double z = (iz + 0.5) * geom.widths[2];
            if (x >= xr[0] && x < xr[1] && y >= yr[0] && y < yr[1] && z >= zr[0] && z < zr[1])
              geom.region_of_cell[geom.cell_index(ix, iy, iz)] = region;
          }
    }
  }

  const auto& bc = require(node, "boundary", "geometry");
  static const std::vector<std::string> faces{"x_lo", "x_hi", "y_lo", "y_hi", "z_lo", "z_hi"};
  require_keys(bc, faces, "geometry.boundary");
  for (std::size_t f = 0; f < faces.size(); ++f)
    geom.boundary[f] = boundary_from_string(
        require(bc, faces[f], "geometry.boundary").get<std::string>(), "geometry.boundary." + faces[f]);

  geom.validate();
  return geom;
}

std::vector<MaterialCrossSections> materials_from_json(const json& node, int region_count) {
  if (!node.is_object()) throw ConfigError("materials: expected an object keyed by region id");
  std::vector<MaterialCrossSections> materials(region_count);
  std::vector<bool> seen(region_count, false);
  for (const auto& [key, value] : node.items()) {
    int region = 0;
    try {
      region = std::stoi(key);
    } catch (...) {
      throw ConfigError("materials: region keys must be integers, got '" + key + "'");
    }
    if (region < 1 || region > region_count)
      throw ConfigError("materials: region " + key + " outside 1.." + std::to_string(region_count));
    const std::string ctx = "materials." + key;
    require_keys(value, {"name", "diffusion", "absorption", "scatter", "chi", "nu_fission"}, ctx);
    const auto& diff = require(value, "diffusion", ctx);
    if (!diff.is_array() || diff.empty()) throw ConfigError(ctx + ".diffusion: expected an array");
    const std::size_t g = diff.size();
    MaterialCrossSections m;
    m.diffusion = double_array(diff, g, ctx + ".diffusion");
    m.sigma_absorption = double_array(require(value, "absorption", ctx), g, ctx + ".absorption");
    m.chi = double_array(require(value, "chi", ctx), g, ctx + ".chi");
    m.nu_fission = double_array(require(value, "nu_fission", ctx), g, ctx + ".nu_fission");
    const auto& scat = require(value, "scatter", ctx);
    if (!scat.is_array() || scat.size() != g)
      throw ConfigError(ctx + ".scatter: expected a " + std::to_string(g) + "x" +
                        std::to_string(g) + " matrix (rows = source group)");
    m.scatter.resize(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(g));
    for (std::size_t i = 0; i < g; ++i) {
      const auto row = double_array(scat[i], g, ctx + ".scatter[" + std::to_string(i) + "]");
      for (std::size_t j = 0; j < g; ++j)
        m.scatter(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
    m.validate(ctx);
    materials[region - 1] = std::move(m);
    seen[region - 1] = true;
  }
  for (int r = 0; r < region_count; ++r)
    if (!seen[r])
      throw ConfigError("materials: missing entry for region " + std::to_string(r + 1));
  return materials;
}

ParameterMap map_from_json(const json& node, int groups) {
  require_keys(node, {"type", "bounds", "multiplier_range", "regions", "rules"}, "parameter_map");
  const std::string type = require(node, "type", "parameter_map").get<std::string>();

  if (type == "takeda5") {
    Box bounds = node.contains("bounds")
                     ? box_from_json(node["bounds"], "parameter_map.bounds")
                     : Box{{{0.8, 1.2}, {0.8, 1.2}, {0.8, 1.2}, {0.8, 1.2}, {0.8, 1.2}}};
    if (groups != 2) throw ConfigError("parameter_map: takeda5 requires 2-group materials");
    return ParameterMap::takeda5(std::move(bounds));
  }
  if (type == "region_scaling9") {
    Box bounds;
    if (node.contains("bounds")) {
      bounds = box_from_json(node["bounds"], "parameter_map.bounds");
    } else {
      bounds.ranges.emplace_back(0.0, 72000.0);
      for (int j = 0; j < 8; ++j) bounds.ranges.emplace_back(0.0, 30000.0);
    }
    std::array<double, 2> mult{0.9, 1.1};
    if (node.contains("multiplier_range")) {
      const auto mr = double_array(node["multiplier_range"], 2, "parameter_map.multiplier_range");
      mult = {mr[0], mr[1]};
    }
    std::vector<int> regions{1, 2, 3, 4, 5, 6, 7, 8, 9};
    if (node.contains("regions")) {
      if (!node["regions"].is_array() || node["regions"].size() != 9)
        throw ConfigError("parameter_map.regions: expected 9 region ids");
      regions.clear();
      for (const auto& r : node["regions"]) regions.push_back(r.get<int>());
    }
    return ParameterMap::region_scaling9(std::move(bounds), mult, std::move(regions));
  }
  if (type == "custom") {
    Box bounds = box_from_json(require(node, "bounds", "parameter_map"), "parameter_map.bounds");
    std::vector<ScalingRule> rules;
    if (node.contains("rules")) {
      for (std::size_t i = 0; i < node["rules"].size(); ++i) {
        const std::string ctx = "parameter_map.rules[" + std::to_string(i) + "]";
        const auto& rj = node["rules"][i];
        require_keys(rj, {"param", "region", "quantity", "op", "group", "group_to"}, ctx);
        ScalingRule rule;
        rule.param = require(rj, "param", ctx).get<int>();
        rule.region = require(rj, "region", ctx).get<int>();
        const std::string q = require(rj, "quantity", ctx).get<std::string>();
        if (q == "absorption") rule.quantity = ScalingRule::Quantity::absorption;
        else if (q == "diffusion") rule.quantity = ScalingRule::Quantity::diffusion;
        else if (q == "nu_fission") rule.quantity = ScalingRule::Quantity::nu_fission;
        else if (q == "scatter") rule.quantity = ScalingRule::Quantity::scatter;
        else throw ConfigError(ctx + ".quantity: unknown quantity '" + q + "'");
        const std::string op = rj.value("op", "multiply");
        if (op == "multiply") rule.op = ScalingRule::Op::multiply;
        else if (op == "divide") rule.op = ScalingRule::Op::divide;
        else throw ConfigError(ctx + ".op: must be 'multiply' or 'divide'");
        rule.group = rj.value("group", 1) - 1;  // config uses 1-based groups
        rule.group_to = rj.value("group_to", 1) - 1;
        rules.push_back(rule);
      }
    }
    return ParameterMap::custom(std::move(bounds), std::move(rules));
  }
  throw ConfigError("parameter_map.type: unknown type '" + type + "'");
}

}  // namespace

Model model_from_json(const json& doc) {
  require_keys(doc, {"geometry", "materials", "parameter_map"}, "model");
  Model model;
  model.geometry = geometry_from_json(require(doc, "geometry", "model"));
  model.materials =
      materials_from_json(require(doc, "materials", "model"), model.geometry.region_count());
  model.groups = model.materials.front().groups();
  for (const auto& m : model.materials)
    if (m.groups() != model.groups)
      throw ConfigError("materials: all regions must declare the same group count");
  model.map = map_from_json(require(doc, "parameter_map", "model"), model.groups);
  model.config_hash = canonical_hash(doc);
  return model;
}

Model load_model(const std::filesystem::path& path) {
  return model_from_json(parse_json_file(path));
}

}  // namespace romdiff
