#include <doctest/doctest.h>

#include <cmath>

#include "gqic/criteria.hpp"
#include "gqic/error.hpp"
#include "gqic/experiment.hpp"

using namespace gqic;

namespace {

ScaleFit fitted(const std::string& scale, std::size_t n = 4000, double h = 0.01) {
  RngStream rng(77, 1);
  const auto p = euler_path(reference_true_model(), case_config("i").noise, n, h, rng);
  return fit_scale(p, registry(scale));
}

}  // namespace

TEST_CASE("scale criteria formulas") {
  const auto f = fitted("Scale3");
  const double p = 2.0, h = f.h, T = f.horizon(), n = static_cast<double>(f.n);
  const double base = -2.0 * f.h1_value;
  const double tr = (f.gamma_gamma_hat.inverse() * f.w_gamma_hat).trace();
  CHECK(scale_criterion(f, ScaleCriterionKind::GQAIC1).value ==
        doctest::Approx(base + 2.0 / h * tr));
  CHECK(scale_criterion(f, ScaleCriterionKind::GQAIC1_SCALAR).value ==
        doctest::Approx(base + p / h * f.nu4_hat));
  CHECK(scale_criterion(f, ScaleCriterionKind::GQAIC1_MOD).value ==
        doctest::Approx(base + p * (f.nu4_hat / h - f.nu2_hat * f.nu2_hat)));
  CHECK(scale_criterion(f, ScaleCriterionKind::GQBIC1).value ==
        doctest::Approx(base + p / h * std::log(T)));
  CHECK(scale_criterion(f, ScaleCriterionKind::GQBIC1_SHARP).value ==
        doctest::Approx(base + p * std::log(n)));
  CHECK(scale_criterion(f, ScaleCriterionKind::FAIC1).value == doctest::Approx(base + 2.0 * p));

  const auto t = scale_criterion(f, ScaleCriterionKind::GQAIC1_TRUNC);
  const double bn = std::pow(T, -(1.0 - kDefaultTruncKappa) / 2.0);
  const double lam_min = f.gamma_gamma_hat.selfadjointView<Eigen::Upper>().eigenvalues().minCoeff();
  CHECK(t.truncated == (lam_min < bn));
  if (!t.truncated) CHECK(t.value == doctest::Approx(base + 2.0 / h * tr));
}

TEST_CASE("singular Gamma in GQAIC1") {
  auto f = fitted("Scale2", 500);
  f.gamma_gamma_hat.setZero();
  CHECK_THROWS_AS(scale_criterion(f, ScaleCriterionKind::GQAIC1), NumericalError);
  const auto t = scale_criterion(f, ScaleCriterionKind::GQAIC1_TRUNC);
  CHECK(t.truncated);
  CHECK(t.value == doctest::Approx(-2.0 * f.h1_value));
}

TEST_CASE("drift criteria formulas") {
  CHECK(drift_criterion(10.0, 2, 50.0, DriftCriterionKind::GQAIC2) == doctest::Approx(-16.0));
  CHECK(drift_criterion(10.0, 2, 50.0, DriftCriterionKind::FAIC2) == doctest::Approx(-16.0));
  CHECK(drift_criterion(10.0, 2, 50.0, DriftCriterionKind::GQBIC2) ==
        doctest::Approx(-20.0 + 2.0 * std::log(50.0)));
}

TEST_CASE("criterion names round trip") {
  for (auto k : all_scale_kinds()) CHECK(parse_scale_kind(to_string(k)) == k);
  for (auto k : all_drift_kinds()) CHECK(parse_drift_kind(to_string(k)) == k);
  CHECK_FALSE(parse_scale_kind("GQAIC3").has_value());
}

TEST_CASE("Gauss-Legendre rule") {
  const auto& q = gauss_legendre(16);
  double wsum = 0.0, m30 = 0.0, m31 = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    wsum += q.w[i];
    m30 += q.w[i] * std::pow(q.x[i], 30);
    m31 += q.w[i] * std::pow(q.x[i], 31);
  }
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(m30 == doctest::Approx(2.0 / 31.0).epsilon(1e-12));
  CHECK(std::abs(m31) < 1e-14);
}

TEST_CASE("free energy expansion of the scale stage") {
  RngStream rng(5, 5);
  const auto p = euler_path(reference_true_model(), case_config("i").noise, 2000, 0.01, rng);
  const auto c = registry("Scale2");
  const auto sf = fit_scale(p, c);
  for (double b : {p.h, 1.0}) {
    const double f1 = free_energy_scale(p, c, b);
    CHECK(std::isfinite(f1));
    CHECK(scale_expansion_residual(f1, sf.h1_value, p.n(), b, 1) < 20.0);
  }
  const CandidateModel m{c, registry("Drift2")};
  const double f2 = free_energy_drift(p, m, sf.gamma);
  const auto df = fit_drift(p, m, sf.gamma);
  CHECK(drift_expansion_residual(f2, df.h2_value, p.horizon(), 1) < 20.0);
  CHECK_THROWS_AS(free_energy_scale(p, registry("Scale4"), 1.0), std::invalid_argument);
}
