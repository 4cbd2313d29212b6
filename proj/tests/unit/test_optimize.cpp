#include <doctest/doctest.h>

#include <cmath>
#include <limits>

#include "gqic/error.hpp"
#include "gqic/optimize.hpp"

using namespace gqic;

TEST_CASE("interior maximum of a smooth function") {
  ParamBox box({-5.0, -5.0}, {5.0, 5.0});
  const auto r = maximize_in_box(
      [](std::span<const double> x) {
        const double a = x[0] - 1.2, b = x[1] + 0.7;
        return -(a * a + 3 * b * b + a * b);
      },
      box);
  CHECK(r.converged);
  CHECK_FALSE(r.boundary_hit);
  CHECK(r.x[0] == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-0.7).epsilon(1e-6));
  CHECK(r.evaluations > 0);
}

TEST_CASE("maximum outside the box lands on the boundary") {
  ParamBox box({0.0}, {1.0});
  const auto r = maximize_in_box([](std::span<const double> x) { return -(x[0] - 3) * (x[0] - 3); },
                                 box);
  CHECK(r.boundary_hit);
  CHECK(r.at_bound[0]);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("numerical failures in part of the box are avoided") {
  ParamBox box({-2.0}, {2.0});
  const auto r = maximize_in_box(
      [](std::span<const double> x) -> double {
        if (x[0] < 0.0) throw NumericalError("undefined");
        return -(x[0] - 0.5) * (x[0] - 0.5);
      },
      box);
  CHECK(r.x[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(maximize_in_box([](std::span<const double>) -> double {
                    throw NumericalError("never finite");
                  }, box),
                  NumericalError);
}

TEST_CASE("multi-start grid") {
  ParamBox box({0.0, 0.0, 0.0}, {3.0, 3.0, 3.0});
  const auto g = start_grid(box, 3);
  CHECK(g.size() == 27);
  CHECK(g.front()[0] == doctest::Approx(0.5));
  CHECK(g.back()[2] == doctest::Approx(2.5));
}

TEST_CASE("multi-start escapes a local maximum") {
  ParamBox box({-4.0}, {4.0});
  const auto r = maximize_in_box(
      [](std::span<const double> x) {
        return std::exp(-(x[0] + 2.5) * (x[0] + 2.5)) + 2.0 * std::exp(-(x[0] - 2.5) * (x[0] - 2.5));
      },
      box);
  CHECK(r.x[0] == doctest::Approx(2.5).epsilon(1e-4));
}
