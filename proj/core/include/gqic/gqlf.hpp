#ifndef GQIC_GQLF_HPP_
#define GQIC_GQLF_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gqic/model.hpp"
#include "gqic/sde.hpp"

namespace gqic {

inline constexpr double kDefaultSMin = 1e-12;

// S_{j-1}(gamma) = c(X_{t_{j-1}}, gamma)^2 for j = 1..n (stored 0-based).
// Throws DegenerateScaleError when any value falls below s_min.
std::vector<double> scale_squared(const SamplePath& path, const Coefficient& scale,
                                  std::span<const double> gamma, double s_min = kDefaultSMin);

// First-stage GQLF
//   H1(gamma) = -1/2 sum_j [ log(2 pi h S_{j-1}) + (Delta_j X)^2 / (h S_{j-1}) ].
double h1(const SamplePath& path, const Coefficient& scale, std::span<const double> gamma,
          double s_min = kDefaultSMin);

// Second-stage GQLF
//   H2(alpha; gamma) = sum_j [ S^{-1} Delta_j X a_{j-1} - (h/2) S^{-1} a_{j-1}^2 ].
double h2(const SamplePath& path, const CandidateModel& model, std::span<const double> alpha,
          std::span<const double> gamma, double s_min = kDefaultSMin);

// Same, with S_{j-1}(gamma) precomputed by scale_squared.
double h2_given_scale(const SamplePath& path, const Coefficient& drift,
                      std::span<const double> alpha, std::span<const double> s);

// sum_j log phi(X_j; X_{j-1} + a_{j-1} h, h S_{j-1}) = H1 + H2.
double h2_star(const SamplePath& path, const CandidateModel& model, std::span<const double> alpha,
               std::span<const double> gamma, double s_min = kDefaultSMin);

// Derivatives in the parameter. Gradients use the chain rule through the
// coefficient gradient; Hessians difference the gradient and are symmetrized.
Eigen::VectorXd h1_gradient(const SamplePath& path, const Coefficient& scale,
                            std::span<const double> gamma, double s_min = kDefaultSMin);
Eigen::MatrixXd h1_hessian(const SamplePath& path, const Coefficient& scale,
                           std::span<const double> gamma, double s_min = kDefaultSMin);
Eigen::VectorXd h2_gradient(const SamplePath& path, const CandidateModel& model,
                            std::span<const double> alpha, std::span<const double> gamma,
                            double s_min = kDefaultSMin);
Eigen::MatrixXd h2_hessian(const SamplePath& path, const CandidateModel& model,
                           std::span<const double> alpha, std::span<const double> gamma,
                           double s_min = kDefaultSMin);

}  // namespace gqic

#endif  // GQIC_GQLF_HPP_
