// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "romdiff/config.hpp"
#include "romdiff/rng.hpp"

using namespace romdiff;

namespace {

MaterialCrossSections core_material() {
  MaterialCrossSections m;
  m.diffusion = {1.5, 0.4};
  m.sigma_absorption = {0.01, 0.085};
  m.scatter = DenseMatrix::Zero(2, 2);
  m.scatter(0, 0) = 0.19;
  m.scatter(0, 1) = 0.02;
  m.scatter(1, 1) = 0.75;
  m.chi = {1.0, 0.0};
  m.nu_fission = {0.005, 0.14};
  return m;
}

MaterialCrossSections one_group(double d, double sigma_a, double sigma_s, double nu_f) {
  MaterialCrossSections m;
  m.diffusion = {d};
  m.sigma_absorption = {sigma_a};
  m.scatter = DenseMatrix::Constant(1, 1, sigma_s);
  m.chi = {nu_f > 0.0 ? 1.0 : 0.0};
  m.nu_fission = {nu_f};
  return m;
}

Geometry single_cell() {
  Geometry geom;
  geom.cells = {1, 1, 1};
  geom.widths = {2.0, 2.0, 2.0};
  geom.region_of_cell = {1};
  return geom;
}

Model takeda_model() {
  return load_model(std::filesystem::path(ROMDIFF_SOURCE_DIR) / "configs/takeda_like.json");
}

}  // namespace

TEST_CASE("single reflective cell, one group: removal and production balances") {
  const Geometry geom = single_cell();
  const double volume = geom.cell_volume();
  const auto mat = one_group(1.4, 0.02, 0.3, 0.05);
  const OperatorPair ops = assemble_operators(geom, {mat});
  REQUIRE(ops.groups == 1);
  REQUIRE(ops.cells == 1);
  CHECK(ops.a(0, 0).to_dense()(0, 0) == doctest::Approx(0.02 * volume).epsilon(1e-14));
  CHECK(ops.b(0, 0).to_dense()(0, 0) == doctest::Approx(0.05 * volume).epsilon(1e-14));
}

TEST_CASE("two-group single reflective cell matches the block formulas") {
  const Geometry geom = single_cell();
  const double volume = geom.cell_volume();
  const auto mat = core_material();
  const OperatorPair ops = assemble_operators(geom, {mat});

  // group-1 removal contains absorption plus downscatter
  CHECK(ops.a(0, 0).to_dense()(0, 0) == doctest::Approx((0.01 + 0.02) * volume));
  CHECK(ops.a(1, 1).to_dense()(0, 0) == doctest::Approx(0.085 * volume));
  // downscatter feeds group 2 from group 1
  CHECK(ops.a(1, 0).to_dense()(0, 0) == doctest::Approx(-0.02 * volume));
  // no upscatter: block (1,2) is exactly zero
  CHECK(ops.a(0, 1).nnz() == 0);
  CHECK(ops.b(0, 0).to_dense()(0, 0) == doctest::Approx(0.005 * volume));
  CHECK(ops.b(0, 1).to_dense()(0, 0) == doctest::Approx(0.14 * volume));
  CHECK(ops.b(1, 0).nnz() == 0);
  CHECK(ops.b(1, 1).nnz() == 0);
}

TEST_CASE("row sums of one-group all-reflective A equal absorption times volume") {
  Geometry geom;
  geom.cells = {4, 3, 2};
  geom.widths = {1.0, 2.0, 3.0};
  geom.region_of_cell.assign(geom.cell_count(), 1);
  const auto mat = one_group(1.2, 0.07, 0.4, 0.0);
  const OperatorPair ops = assemble_operators(geom, {mat});
  const DenseMatrix a = ops.a(0, 0).to_dense();
  const double expected = 0.07 * geom.cell_volume();
  for (index_t r = 0; r < geom.cell_count(); ++r)
    CHECK(a.row(r).sum() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("a vacuum face makes A strictly diagonally dominant") {
  Geometry geom;
  geom.cells = {3, 3, 1};
  geom.widths = {1.0, 1.0, 1.0};
  geom.region_of_cell.assign(geom.cell_count(), 1);
  geom.boundary[1] = BoundaryCondition::vacuum;  // x_hi
  const auto mat = one_group(0.9, 0.01, 0.2, 0.0);
  const OperatorPair ops = assemble_operators(geom, {mat});
  const DenseMatrix a = ops.a(0, 0).to_dense();
  for (index_t r = 0; r < geom.cell_count(); ++r) {
    double off = 0.0;
    for (index_t c = 0; c < geom.cell_count(); ++c)
      if (c != r) off += std::abs(a(r, c));
    CHECK(a(r, r) > off);
  }
}

TEST_CASE("assembly is permutation-equivariant under axis relabeling") {
  // transposing the x/y roles of a flat grid is a cell permutation P;
  // the assembled operator must transform as P A P^T
  Geometry geom;
  geom.cells = {3, 2, 1};
  geom.widths = {1.5, 1.5, 1.0};
  geom.region_of_cell = {1, 2, 1, 2, 1, 1};
  geom.boundary[0] = BoundaryCondition::vacuum;

  Geometry swapped;
  swapped.cells = {2, 3, 1};
  swapped.widths = {1.5, 1.5, 1.0};
  swapped.region_of_cell.assign(6, 1);
  swapped.boundary[2] = BoundaryCondition::vacuum;  // x_lo became y_lo

  std::vector<index_t> perm(6);  // swapped index -> original index
  for (index_t iy = 0; iy < 2; ++iy)
    for (index_t ix = 0; ix < 3; ++ix) {
      swapped.region_of_cell[swapped.cell_index(iy, ix, 0)] =
          geom.region_of_cell[geom.cell_index(ix, iy, 0)];
      perm[swapped.cell_index(iy, ix, 0)] = geom.cell_index(ix, iy, 0);
    }

  const auto mat1 = one_group(1.0, 0.05, 0.3, 0.04);
  const auto mat2 = one_group(0.5, 0.08, 0.1, 0.0);
  const DenseMatrix a = assemble_operators(geom, {mat1, mat2}).a(0, 0).to_dense();
  const DenseMatrix a_swapped = assemble_operators(swapped, {mat1, mat2}).a(0, 0).to_dense();
  for (index_t r = 0; r < 6; ++r)
    for (index_t c = 0; c < 6; ++c)
      CHECK(a_swapped(r, c) == doctest::Approx(a(perm[r], perm[c])).epsilon(1e-14));
}

TEST_CASE("transpose of a symmetric one-group operator equals the original") {
  Geometry geom;
  geom.cells = {3, 1, 1};
  geom.widths = {1.0, 1.0, 1.0};
  geom.region_of_cell.assign(3, 1);
  const OperatorPair ops = assemble_operators(geom, {one_group(1.0, 0.1, 0.2, 0.03)});
  const OperatorPair t = transpose_operators(ops);
  CHECK((t.a(0, 0).to_dense() - ops.a(0, 0).to_dense()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transpose moves the downscatter block from (2,1) to (1,2)") {
  const OperatorPair ops = assemble_operators(single_cell(), {core_material()});
  const OperatorPair t = transpose_operators(ops);
  CHECK(t.a(0, 1).nnz() > 0);
  CHECK(t.a(1, 0).nnz() == 0);
  CHECK(t.a(0, 1).to_dense()(0, 0) == ops.a(1, 0).to_dense()(0, 0));
}

TEST_CASE("double transpose round-trips an assembled pair") {
  const Model model = takeda_model();
  const OperatorPair ops = assemble_at(model, {1.1, 0.9, 1.05, 0.95, 1.2});
  const OperatorPair round = transpose_operators(transpose_operators(ops));
  for (index_t g = 0; g < ops.groups; ++g)
    for (index_t gp = 0; gp < ops.groups; ++gp) {
      CHECK(round.a(g, gp).values() == ops.a(g, gp).values());
      CHECK(round.a(g, gp).col_indices() == ops.a(g, gp).col_indices());
      CHECK(round.b(g, gp).values() == ops.b(g, gp).values());
    }
}

TEST_CASE("takeda5 map at the reference point reproduces nominal assembly bit-exactly") {
  const Model model = takeda_model();
  const OperatorPair nominal = assemble_operators(model.geometry, model.materials);
  const OperatorPair mapped = assemble_at(model, model.map.reference_point());
  for (index_t g = 0; g < nominal.groups; ++g)
    for (index_t gp = 0; gp < nominal.groups; ++gp) {
      CHECK(mapped.a(g, gp).values() == nominal.a(g, gp).values());
      CHECK(mapped.b(g, gp).values() == nominal.b(g, gp).values());
    }
}

TEST_CASE("takeda5 map scales exactly the advertised coefficients") {
  const Model model = takeda_model();
  const auto scaled = evaluate_parameters(model, {1.2, 1.0, 1.0, 1.0, 1.0});
  for (std::size_t r = 0; r < model.materials.size(); ++r) {
    const auto& nominal = model.materials[r];
    CHECK(scaled[r].diffusion[0] == doctest::Approx(nominal.diffusion[0] / 1.2).epsilon(1e-15));
    CHECK(scaled[r].diffusion[1] == nominal.diffusion[1]);
    CHECK(scaled[r].sigma_absorption[0] ==
          doctest::Approx(nominal.sigma_absorption[0] * 1.2).epsilon(1e-15));
    CHECK(scaled[r].sigma_absorption[1] == nominal.sigma_absorption[1]);
    CHECK(scaled[r].scatter(0, 1) == nominal.scatter(0, 1));
    CHECK(scaled[r].nu_fission == nominal.nu_fission);
  }
}

TEST_CASE("region_scaling9 touches only the mapped region") {
  const Model model =
      load_model(std::filesystem::path(ROMDIFF_SOURCE_DIR) / "configs/minicore_like.json");
  std::vector<double> mu = model.map.reference_point();
  mu[0] = 72000.0;  // multiplier 1.1 on region 1 only
  const auto scaled = evaluate_parameters(model, mu);
  CHECK(scaled[0].sigma_absorption[0] ==
        doctest::Approx(model.materials[0].sigma_absorption[0] * 1.1).epsilon(1e-14));
  CHECK(scaled[0].nu_fission[1] ==
        doctest::Approx(model.materials[0].nu_fission[1] * 1.1).epsilon(1e-14));
  for (std::size_t r = 1; r < model.materials.size(); ++r) {
    CHECK(scaled[r].sigma_absorption == model.materials[r].sigma_absorption);
    CHECK(scaled[r].nu_fission == model.materials[r].nu_fission);
  }
}

TEST_CASE("parameter dimension mismatch is rejected") {
  const Model model = takeda_model();
  CHECK_THROWS_AS(evaluate_parameters(model, {1.0, 1.0}), DimensionError);
}

TEST_CASE("invalid materials are rejected at assembly") {
  auto mat = one_group(1.0, 0.05, 0.2, 0.01);
  mat.sigma_absorption[0] = -0.01;
  CHECK_THROWS_AS(assemble_operators(single_cell(), {mat}), InvalidMaterialError);

  auto bad_chi = core_material();
  bad_chi.chi = {0.7, 0.0};  // fissile but spectrum does not sum to 1
  CHECK_THROWS_AS(assemble_operators(single_cell(), {bad_chi}), InvalidMaterialError);
}

TEST_CASE("config loader rejects unknown keys and names missing ones") {
  json doc = parse_json_file(std::filesystem::path(ROMDIFF_SOURCE_DIR) / "configs/takeda_like.json");
  json broken = doc;
  broken["geometry"]["typo_key"] = 1;
  CHECK_THROWS_WITH_AS(Model m = model_from_json(broken),
                       doctest::Contains("unknown key 'typo_key'"), ConfigError);

  json missing = doc;
  missing["parameter_map"] = {{"type", "custom"}};
  try {
    Model m = model_from_json(missing);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bounds") != std::string::npos);
  }
}

TEST_CASE("custom map rules apply per region and quantity") {
  json doc = parse_json_file(std::filesystem::path(ROMDIFF_SOURCE_DIR) / "configs/takeda_like.json");
  doc["parameter_map"] = {
      {"type", "custom"},
      {"bounds", {{0.5, 2.0}, {0.5, 2.0}}},
      {"rules",
       {{{"param", 0}, {"region", 1}, {"quantity", "absorption"}, {"group", 1}},
        {{"param", 1}, {"region", 1}, {"quantity", "diffusion"}, {"op", "divide"}, {"group", 2}}}}};
  const Model model = model_from_json(doc);
  const auto scaled = evaluate_parameters(model, {1.5, 2.0});
  CHECK(scaled[0].sigma_absorption[0] ==
        doctest::Approx(model.materials[0].sigma_absorption[0] * 1.5));
  CHECK(scaled[0].diffusion[1] == doctest::Approx(model.materials[0].diffusion[1] / 2.0));
  CHECK(scaled[1].sigma_absorption == model.materials[1].sigma_absorption);
  // reference point is all-ones
  const auto ref = evaluate_parameters(model, model.map.reference_point());
  CHECK(ref[0].sigma_absorption == model.materials[0].sigma_absorption);
}
