#ifndef GQIC_LIMIT_DIST_HPP_
#define GQIC_LIMIT_DIST_HPP_

#include <cstddef>

#include <Eigen/Dense>

#include "gqic/model.hpp"
#include "gqic/rng.hpp"

namespace gqic {

// Gamma and W of the larger model, plus the threshold the weighted chi-square
// sum must exceed for the larger model to be preferred.
struct LimitInputs {
  Eigen::MatrixXd Gamma;
  Eigen::MatrixXd W;
  double penalty_threshold = 0.0;
};

// Eigenvalues of W^{1/2} G W^{1/2}, G = Gamma^{-1} - F (F^T Gamma F)^{-1} F^T,
// ascending. Tiny negatives are clamped to zero; anything below -1e-10
// (relative to the largest magnitude) is an error.
Eigen::VectorXd nesting_eigenvalues(const LimitInputs& in, const NestingMap& map);

struct TailEstimate {
  double prob = 0.0;
  double std_error = 0.0;
};

// P(sum_j lambda_j chi^2_{1,j} > threshold) by Monte Carlo (n_mc >= 1e4).
TailEstimate weighted_chisq_tail(const Eigen::VectorXd& lambda, double threshold,
                                 std::size_t n_mc, RngStream& rng);

enum class LimitKind { Scale, Drift };

// Probability that the larger of two nested models is asymptotically
// preferred. For LimitKind::Drift, W is ignored (W = Gamma) and the
// threshold is 2 (p_large - p_small).
TailEstimate asymptotic_selection_prob(const LimitInputs& in, const NestingMap& map,
                                       LimitKind kind, std::size_t n_mc, RngStream& rng);

// 2 tr(Gamma_L^{-1} W_L) - 2 tr(Gamma_S^{-1} W_S).
double scale_penalty_threshold(const Eigen::MatrixXd& gamma_large, const Eigen::MatrixXd& w_large,
                               const Eigen::MatrixXd& gamma_small, const Eigen::MatrixXd& w_small);

// Throws std::invalid_argument unless F^T F = I to 1e-12 and c matches.
void validate_nesting(const NestingMap& map);

}  // namespace gqic

#endif  // GQIC_LIMIT_DIST_HPP_
