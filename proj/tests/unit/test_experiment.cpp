#include <doctest/doctest.h>

#include <fstream>
#include <sstream>

#include "gqic/experiment.hpp"

using namespace gqic;

namespace {

ExperimentConfig small_config() {
  auto c = case_config("ii");
  c.grid = {{0.01, 5.0}};
  c.replications = 6;
  c.scales = {"Scale1", "Scale2"};
  c.drifts = {"Drift1", "Drift2"};
  c.criteria = criterion_preset("gqbic,faic");
  return c;
}

}  // namespace

TEST_CASE("experiment results do not depend on the thread count") {
  auto c = small_config();
  c.threads = 1;
  const auto a = run_experiment(c);
  c.threads = 3;
  const auto b = run_experiment(c);
  REQUIRE(a.grid.size() == 1);
  REQUIRE(a.grid[0].tables.size() == 2);
  for (std::size_t t = 0; t < 2; ++t) {
    CHECK(a.grid[0].tables[t].counts == b.grid[0].tables[t].counts);
    CHECK(a.grid[0].tables[t].total() == 6);
  }
  std::ostringstream x, y;
  write_frequency_csv(x, a);
  write_frequency_csv(y, b);
  CHECK(x.str() == y.str());
  CHECK(x.str().rfind("T,h,n,criterion,scale_idx,drift_idx,count\n", 0) == 0);
  CHECK(to_json(a).at("metadata").contains("seed_derivation"));
}

TEST_CASE("replication paths use their own streams") {
  const auto c = small_config();
  const auto p0 = simulate_replication(c, c.grid[0], 0);
  const auto p0b = simulate_replication(c, c.grid[0], 0);
  const auto p1 = simulate_replication(c, c.grid[0], 1);
  CHECK(p0.values == p0b.values);
  CHECK(p0.values != p1.values);
  CHECK(p0.n() == 500);
}

TEST_CASE("configuration JSON round trip") {
  auto c = case_config("iii");
  c.base_seed = 99;
  c.threads = 2;
  const auto j = to_json(c);
  const auto d = experiment_config_from_json(j);
  CHECK(to_json(d) == j);
  CHECK(std::get<NigNoise>(d.noise) == std::get<NigNoise>(c.noise));

  nlohmann::json partial{{"replications", 17}};
  const auto e = experiment_config_from_json(partial, c);
  CHECK(e.replications == 17);
  CHECK(e.base_seed == 99);
  CHECK_THROWS(experiment_config_from_json({{"scales", {"Scale9"}}}));
}

TEST_CASE("presets and validation") {
  CHECK(criterion_preset("standard").size() == 4);
  CHECK(criterion_preset("gqbic-sharp")[0].scale == ScaleCriterionKind::GQBIC1_SHARP);
  const auto explicit_pair = criterion_preset("GQAIC1_MOD:GQAIC2");
  CHECK(explicit_pair[0].scale == ScaleCriterionKind::GQAIC1_MOD);
  CHECK_THROWS_AS(criterion_preset("nonsense"), std::invalid_argument);
  CHECK_THROWS_AS(case_config("iv"), std::invalid_argument);
  CHECK_THROWS(GridPoint{0.03, 1.0}.n());
  auto c = small_config();
  c.replications = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config();
  c.grid = {{0.1, 50.0}};
  CHECK_FALSE(design_warnings(c).empty());
}

TEST_CASE("reference tables and comparison") {
  std::istringstream in(
      "case,criterion,T,h,n,drift,scale,count\n"
      "i,GQBIC,5,0.01,500,Drift1,Scale1,1\n"
      "i,GQBIC,5,0.01,500,Drift1,Scale2,2\n"
      "i,GQBIC,5,0.01,500,Drift2,Scale1,0\n"
      "i,GQBIC,5,0.01,500,Drift2,Scale2,97\n");
  const auto rows = read_reference_csv(in);
  CHECK(rows.size() == 4);
  const auto block = reference_block(rows, "GQBIC", 5.0, 0.01, {"Drift1", "Drift2"},
                                     {"Scale1", "Scale2"});
  CHECK(block.total() == 100);
  CHECK(block.counts[1][1] == 97);
  CHECK_THROWS_AS(reference_block(rows, "fAIC", 5.0, 0.01, {"Drift1", "Drift2"},
                                  {"Scale1", "Scale2"}),
                  std::invalid_argument);

  CellTable t;
  t.pair = *pair_for_reference_label("GQBIC");
  t.counts = {{0, 1}, {0, 9}};
  const auto rep = compare_to_reference(t, block, 3.0);
  CHECK(rep.pass);
  CHECK(rep.cells.size() == 4);
  t.counts = {{9, 1}, {0, 0}};
  CHECK_FALSE(compare_to_reference(t, block, 3.0).pass);
  CHECK(reference_label(t.pair) == "GQBIC");
}

TEST_CASE("shipped reference data") {
  for (const char* f : {"table1.csv", "table2.csv", "table3.csv"}) {
    std::ifstream in(std::string(GQIC_REFERENCE_DIR) + "/" + f);
    REQUIRE(in.good());
    const auto rows = read_reference_csv(in);
    const auto b = reference_block(rows, "GQBIC", 50.0, 0.01, {"Drift1", "Drift2", "Drift3"},
                                   {"Scale1", "Scale2", "Scale3", "Scale4"});
    CHECK(b.total() == 1000);
  }
}
