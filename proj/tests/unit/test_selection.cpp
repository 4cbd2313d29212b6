#include <doctest/doctest.h>

#include <cmath>

#include "gqic/error.hpp"
#include "gqic/experiment.hpp"
#include "gqic/selection.hpp"

using namespace gqic;

namespace {

std::vector<Coefficient> coefs(std::initializer_list<const char*> names) {
  std::vector<Coefficient> out;
  for (auto n : names) out.push_back(registry(n));
  return out;
}

SamplePath clean_path() {
  RngStream rng(123, 1);
  return euler_path(reference_true_model(), case_config("i").noise, 5000, 0.01, rng);
}

}  // namespace

TEST_CASE("stepwise GQBIC selects the true model on a long path") {
  const auto p = clean_path();
  const auto scales = coefs({"Scale1", "Scale2", "Scale3", "Scale4"});
  const auto drifts = coefs({"Drift1", "Drift2", "Drift3"});
  FitCache cache;
  const auto o = stepwise_select(p, scales, drifts, ScaleCriterionKind::GQBIC1,
                                 DriftCriterionKind::GQBIC2, {}, &cache);
  CHECK(o.scale.names[o.scale.chosen] == "Scale2");
  CHECK(o.drift.names[o.drift.chosen] == "Drift2");
  CHECK(o.evaluations == 7);
  CHECK(o.scale_fits.size() == 4);
  REQUIRE(o.chosen_drift_fit.has_value());
  CHECK(cache.scale_fits() == 4);
  CHECK(cache.drift_fits() == 3);

  // A second pair reuses every fit.
  stepwise_select(p, scales, drifts, ScaleCriterionKind::FAIC1, DriftCriterionKind::FAIC2, {},
                  &cache);
  CHECK(cache.scale_fits() == 4);

  const auto j = to_json(o);
  CHECK(j.contains("scale_step"));
  CHECK(j.contains("drift_step"));
}

TEST_CASE("failed candidates are skipped and reported") {
  const auto p = clean_path();
  auto broken = registry("Scale1");
  broken.name = "Broken";
  broken.eval = [](double, std::span<const double>) { return 0.0; };
  broken.grad = nullptr;
  const std::vector<Coefficient> scales{broken, registry("Scale2")};
  const auto r = select_scale(p, scales, ScaleCriterionKind::GQBIC1);
  CHECK(r.failed[0]);
  CHECK(std::isinf(r.values[0]));
  CHECK_FALSE(r.errors[0].empty());
  CHECK(r.chosen == 1);
  CHECK_THROWS_AS(select_scale(p, {broken}, ScaleCriterionKind::GQBIC1), NumericalError);
}

TEST_CASE("full grid scores drifts under every scale") {
  const auto p = clean_path();
  SelectionConfig cfg;
  cfg.full_grid = true;
  const auto o = stepwise_select(p, coefs({"Scale1", "Scale2"}), coefs({"Drift1", "Drift2"}),
                                 ScaleCriterionKind::GQBIC1, DriftCriterionKind::GQBIC2, cfg);
  CHECK(o.full_grid.size() == 2);
  CHECK(o.full_grid[1].values == o.drift.values);
}

TEST_CASE("ties pick the first candidate") {
  const auto p = clean_path();
  const auto r = select_scale(p, coefs({"Scale2", "Scale2"}), ScaleCriterionKind::GQBIC1);
  CHECK(r.tie);
  CHECK(r.chosen == 0);
}
