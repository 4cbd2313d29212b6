#ifndef GQIC_CRITERIA_HPP_
#define GQIC_CRITERIA_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gqic/estimator.hpp"

namespace gqic {

enum class ScaleCriterionKind {
  GQAIC1,
  GQAIC1_SCALAR,
  GQAIC1_TRUNC,
  GQAIC1_MOD,
  GQBIC1,
  GQBIC1_SHARP,
  FAIC1
};

enum class DriftCriterionKind { GQAIC2, GQBIC2, FAIC2 };

std::string_view to_string(ScaleCriterionKind k);
std::string_view to_string(DriftCriterionKind k);
std::optional<ScaleCriterionKind> parse_scale_kind(std::string_view s);
std::optional<DriftCriterionKind> parse_drift_kind(std::string_view s);
const std::vector<ScaleCriterionKind>& all_scale_kinds();
const std::vector<DriftCriterionKind>& all_drift_kinds();

inline constexpr double kDefaultTruncKappa = 0.2;

struct CriterionValue {
  double value = 0.0;
  bool truncated = false;  // GQAIC1_TRUNC indicator was zero
};

// Scale-stage statistic. GQAIC1 throws NumericalError when Gamma_gamma-hat is
// singular; GQAIC1_TRUNC then drops the penalty whenever
// lambda_min(Gamma_gamma-hat) < T^{-(1 - kappa)/2}.
CriterionValue scale_criterion(const ScaleFit& fit, ScaleCriterionKind kind,
                               double trunc_kappa = kDefaultTruncKappa);

double drift_criterion(double h2_value, std::size_t p_alpha, double horizon,
                       DriftCriterionKind kind);
inline double drift_criterion(const DriftFit& fit, double horizon, DriftCriterionKind kind) {
  return drift_criterion(fit.h2_value, fit.p_alpha(), horizon, kind);
}

// Log prior density on the box; an empty function means uniform.
using LogPrior = std::function<double(std::span<const double>)>;

struct FreeEnergyOptions {
  std::size_t nodes = 64;  // Gauss-Legendre nodes per panel and dimension
  LogPrior log_prior;
  // Location of the integrand's peak. Found by maximizing when absent.
  std::optional<std::vector<double>> mode;
  OptConfig opt;
};

// F1(b) = -(n b)^{-1} log int exp{b H1(gamma)} pi(gamma) d gamma, p_gamma <= 2.
double free_energy_scale(const SamplePath& path, const Coefficient& scale, double b,
                         const FreeEnergyOptions& opt = {});

// F2 = -T^{-1} log int exp{H2(alpha; gamma_hat)} pi(alpha) d alpha, p_alpha <= 2.
double free_energy_drift(const SamplePath& path, const CandidateModel& model,
                         std::span<const double> gamma_hat, const FreeEnergyOptions& opt = {});

// (n b) |F1(b) + H1/n - p/(2 n b) log(n b)|; b = h gives the T-scaled residual.
double scale_expansion_residual(double f1, double h1_hat, std::size_t n, double b,
                                std::size_t p_gamma);
// T |F2 + H2/T - p/(2T) log T|.
double drift_expansion_residual(double f2, double h2_hat, double horizon, std::size_t p_alpha);

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussLegendre& gauss_legendre(std::size_t nodes);

}  // namespace gqic

#endif  // GQIC_CRITERIA_HPP_
