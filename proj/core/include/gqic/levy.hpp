#ifndef GQIC_LEVY_HPP_
#define GQIC_LEVY_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gqic/rng.hpp"

namespace gqic {

struct GaussianNoise {
  bool operator==(const GaussianNoise&) const = default;
};

// Barndorff-Nielsen parameterization: Z_t ~ NIG(alpha, beta, delta_rate * t,
// mu_rate * t).
struct NigNoise {
  double alpha = 1.0;
  double beta = 0.0;
  double delta_rate = 1.0;
  double mu_rate = 0.0;
  bool operator==(const NigNoise&) const = default;
};

// Z_t = G+_t - G-_t with G+_t ~ Gamma(shape_pos_rate * t, rate_pos) and
// G-_t ~ Gamma(shape_neg_rate * t, rate_neg), independent.
struct BilateralGammaNoise {
  double shape_pos_rate = 1.0;
  double rate_pos = 1.0;
  double shape_neg_rate = 1.0;
  double rate_neg = 1.0;
  bool operator==(const BilateralGammaNoise&) const = default;
};

using LevySpec = std::variant<GaussianNoise, NigNoise, BilateralGammaNoise>;

// Per-unit-time cumulants of Z_1. For the pure-jump variants nu3 and nu4 are
// the third and fourth moments of the Levy measure (= kappa_3, kappa_4).
struct CumulantRates {
  double mean_rate = 0.0;
  double var_rate = 0.0;
  double nu3 = 0.0;
  double nu4 = 0.0;
};

// Throws std::invalid_argument when parameters are out of their domain.
void validate(const LevySpec& spec);

CumulantRates cumulant_rates(const LevySpec& spec);

// Returns a human-readable warning when Z_1 is not zero-mean/unit-variance
// within tol. The noise is still usable.
std::optional<std::string> standardization_warning(const LevySpec& spec,
                                                   double tol = 1e-9);

std::string kind_name(const LevySpec& spec);
std::string describe(const LevySpec& spec);

// n i.i.d. draws of Z_h. A non-finite draw is retried once before failing
// with NumericalError.
std::vector<double> increments(const LevySpec& spec, std::size_t n, double h,
                               RngStream& rng);

// Single draw; used by the path simulator to avoid buffering.
double draw_increment(const LevySpec& spec, double h, RngStream& rng);

}  // namespace gqic

#endif  // GQIC_LEVY_HPP_
