#include <doctest/doctest.h>

#include <sstream>

#include "gqic/error.hpp"
#include "gqic/experiment.hpp"
#include "gqic/sde.hpp"

using namespace gqic;

TEST_CASE("euler paths are deterministic for a seed") {
  const auto model = reference_true_model();
  const auto noise = case_config("i").noise;
  RngStream a(3, 9), b(3, 9);
  const auto p = euler_path(model, noise, 500, 0.01, a);
  const auto q = euler_path(model, noise, 500, 0.01, b);
  CHECK(p.n() == 500);
  CHECK(p.values.front() == model.x0);
  CHECK(p.values == q.values);
  CHECK(p.horizon() == doctest::Approx(5.0));
}

TEST_CASE("true model is the Scale2/Drift2 truth") {
  const auto m = reference_true_model();
  CHECK(m.drift(2.0) == doctest::Approx(-1.0));
  CHECK(m.scale(1.0) == doctest::Approx(1.5));
}

TEST_CASE("explosive drift is reported") {
  TrueModel m{[](double x) { return 50.0 * x; }, [](double) { return 1.0; }, 1.0};
  RngStream rng(1, 1);
  CHECK_THROWS_AS(euler_path(m, GaussianNoise{}, 1000, 1.0, rng), NumericalError);
}

TEST_CASE("path CSV round trip is exact") {
  RngStream rng(8, 1);
  const auto p = euler_path(reference_true_model(), case_config("iii").noise, 200, 0.005, rng);
  std::stringstream ss;
  write_path_csv(ss, p, {"hello", "world"});
  const std::string text = ss.str();
  CHECK(text.rfind("# hello\n# world\ntime,value\n", 0) == 0);
  const auto q = read_path_csv(ss);
  CHECK(q.h == doctest::Approx(p.h).epsilon(1e-12));
  CHECK(q.values == p.values);
}

TEST_CASE("malformed CSV reports line and column") {
  {
    std::istringstream in("t,v\n0,1\n");
    try {
      read_path_csv(in);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.line() == 1u);
    }
  }
  {
    std::istringstream in("time,value\n0,1\n0.1,abc\n0.2,3\n");
    try {
      read_path_csv(in);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.line() == 3u);
      CHECK(e.column() == 5u);  // character position of "abc"
    }
  }
  {
    std::istringstream in("time,value\n0,1\n0.1,2\n0.3,3\n");
    CHECK_THROWS_AS(read_path_csv(in), DataError);
  }
  {
    std::istringstream in("time,value\n0,1\n0.1,2,5\n");
    CHECK_THROWS_AS(read_path_csv(in), DataError);
  }
}

TEST_CASE("declared step overrides inference") {
  std::istringstream in("time,value\n0,1\n0.1,2\n0.2,3\n");
  const auto p = read_path_csv(in, 0.1);
  CHECK(p.h == 0.1);
  CHECK(p.n() == 2);
}
