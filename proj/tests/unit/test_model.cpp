#include <doctest/doctest.h>

#include <cmath>

#include "gqic/limit_dist.hpp"
#include "gqic/model.hpp"
#include "gqic/rng.hpp"

using namespace gqic;

TEST_CASE("registry") {
  CHECK(registry_names().size() == 7);
  CHECK(registry("Scale4").dim == 3);
  CHECK(registry("Drift3").dim == 2);
  CHECK_THROWS_AS(registry("Scale5"), std::invalid_argument);
  const double g[] = {3.0};
  CHECK(registry("Scale2")(1.0, g) == doctest::Approx(1.5));
  const double a[] = {0.5};
  CHECK(registry("Drift2")(2.0, a) == doctest::Approx(-1.0));
}

TEST_CASE("analytic gradients agree with finite differences") {
  RngStream rng(2, 2);
  for (const auto& name : registry_names()) {
    auto c = registry(name);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> th(c.dim);
      for (std::size_t k = 0; k < c.dim; ++k)
        th[k] = c.box.lo()[k] + (0.1 + 0.8 * rng.uniform()) * c.box.width(k);
      const double x = 4.0 * rng.uniform() - 2.0;
      const auto g = grad_or_fd(c, x, th);
      const auto fd = finite_difference_grad(c, x, th);
      for (std::size_t k = 0; k < c.dim; ++k) CHECK(g[k] == doctest::Approx(fd[k]).epsilon(1e-7));
    }
  }
}

TEST_CASE("coefficients without gradients fall back to finite differences") {
  auto c = registry("Scale3");
  c.grad = nullptr;
  const double th[] = {2.0, 1.0};
  const auto g = grad_or_fd(c, 1.0, th);
  CHECK(g[0] == doctest::Approx(0.5));
  CHECK(g[1] == doctest::Approx(0.5));
}

TEST_CASE("nesting maps embed the smaller coefficient") {
  const std::pair<const char*, const char*> pairs[] = {
      {"Scale2", "Scale3"}, {"Scale2", "Scale4"}, {"Scale3", "Scale4"},
      {"Drift1", "Drift3"}, {"Drift2", "Drift3"}};
  RngStream rng(4, 4);
  for (auto [s, l] : pairs) {
    const auto m = registry_nesting(s, l);
    REQUIRE(m.has_value());
    CHECK_NOTHROW(validate_nesting(*m));
    const auto small = registry(s), large = registry(l);
    for (int rep = 0; rep < 10; ++rep) {
      Eigen::VectorXd ts(small.dim);
      for (Eigen::Index k = 0; k < ts.size(); ++k) ts[k] = 0.5 + rng.uniform();
      const Eigen::VectorXd tl = m->F * ts + m->c;
      const double x = 3.0 * rng.normal();
      CHECK(small(x, {ts.data(), small.dim}) ==
            doctest::Approx(large(x, {tl.data(), large.dim})));
    }
  }
  CHECK_FALSE(registry_nesting("Scale1", "Scale2").has_value());
  CHECK_FALSE(registry_nesting("Drift1", "Drift2").has_value());
}

TEST_CASE("parameter boxes") {
  CHECK_THROWS_AS(ParamBox({1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ParamBox({0.0, 0.0}, {1.0}), std::invalid_argument);
  ParamBox b({0.0, -1.0}, {1.0, 1.0});
  CHECK(b.volume() == doctest::Approx(2.0));
  const double t[] = {2.0, -3.0};
  const auto c = b.clamp(t);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == -1.0);
  CHECK(b.contains(c));
  CHECK_FALSE(b.contains(t));
  CHECK_THROWS_AS(with_box(registry("Scale2"), b), std::invalid_argument);
}
