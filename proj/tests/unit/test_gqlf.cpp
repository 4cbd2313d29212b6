#include <doctest/doctest.h>

#include <cmath>

#include "gqic/error.hpp"
#include "gqic/experiment.hpp"
#include "gqic/gqlf.hpp"
#include "oracles.hpp"

using namespace gqic;

namespace {

SamplePath test_path(std::uint64_t seed, std::size_t n = 400) {
  RngStream rng(seed, 1);
  return euler_path(reference_true_model(), case_config("i").noise, n, 0.01, rng);
}

}  // namespace

TEST_CASE("h1 and h2 match the naive sums") {
  const auto p = test_path(1);
  const CandidateModel m{registry("Scale4"), registry("Drift3")};
  const double g[] = {2.5, 0.3, 0.7};
  const double a[] = {0.4, -0.2};
  CHECK(h1(p, m.scale, g) ==
        doctest::Approx(static_cast<double>(oracle::naive_h1(p, m.scale, g))).epsilon(1e-12));
  CHECK(h2(p, m, a, g) ==
        doctest::Approx(static_cast<double>(oracle::naive_h2(p, m.drift, a, m.scale, g)))
            .epsilon(1e-12));
  CHECK(h2_star(p, m, a, g) == doctest::Approx(h1(p, m.scale, g) + h2(p, m, a, g)).epsilon(1e-12));
  const auto s = scale_squared(p, m.scale, g);
  CHECK(h2_given_scale(p, m.drift, a, s) == doctest::Approx(h2(p, m, a, g)).epsilon(1e-14));
}

TEST_CASE("analytic gradients match finite differences of the GQLF") {
  const auto p = test_path(2);
  const CandidateModel m{registry("Scale3"), registry("Drift3")};
  std::vector<double> g{2.8, 0.4};
  std::vector<double> a{0.5, 0.1};
  const auto gg = h1_gradient(p, m.scale, g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double e = 1e-6;
    auto up = g, dn = g;
    up[k] += e;
    dn[k] -= e;
    CHECK(gg[static_cast<Eigen::Index>(k)] ==
          doctest::Approx((h1(p, m.scale, up) - h1(p, m.scale, dn)) / (2 * e)).epsilon(1e-5));
  }
  const auto ga = h2_gradient(p, m, a, g);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double e = 1e-6;
    auto up = a, dn = a;
    up[k] += e;
    dn[k] -= e;
    CHECK(ga[static_cast<Eigen::Index>(k)] ==
          doctest::Approx((h2(p, m, up, g) - h2(p, m, dn, g)) / (2 * e)).epsilon(1e-5));
  }
  const auto H = h1_hessian(p, m.scale, g);
  CHECK(H.rows() == 2);
  CHECK((H - H.transpose()).norm() == doctest::Approx(0.0));
  CHECK(H(0, 0) < 0.0);
}

TEST_CASE("degenerate scale names the offending increment") {
  SamplePath p;
  p.h = 0.1;
  p.values = {0.0, 0.1, 0.0, 0.2};
  const auto c = registry("Scale3");
  const double g[] = {1.0, -1.0};
  CHECK_NOTHROW(h1(p, c, g));
  Coefficient zero = c;
  zero.eval = [](double x, std::span<const double>) { return x == 0.0 ? 1.0 : 0.0; };
  try {
    h1(p, zero, g);
    FAIL("expected DegenerateScaleError");
  } catch (const DegenerateScaleError& e) {
    CHECK(e.index() == 2u);
  }
}
