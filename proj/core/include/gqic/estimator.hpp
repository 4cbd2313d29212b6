#ifndef GQIC_ESTIMATOR_HPP_
#define GQIC_ESTIMATOR_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gqic/gqlf.hpp"
#include "gqic/model.hpp"
#include "gqic/optimize.hpp"
#include "gqic/sde.hpp"

namespace gqic {

inline constexpr double kMaxCondition = 1e12;

struct NuHats {
  double nu2 = 0.0;  // T^{-1} sum (Delta X)^2 / c^2
  double nu4 = 0.0;  // T^{-1} sum (Delta X / c)^4
};

NuHats nu_hats(const SamplePath& path, const Coefficient& scale, std::span<const double> gamma);

// (2n)^{-1} sum (dS / S)(dS / S)^T.
Eigen::MatrixXd gamma_gamma_hat(const SamplePath& path, const Coefficient& scale,
                                std::span<const double> gamma);

// (4T)^{-1} sum (dS chi^2 / S^2)(dS chi^2 / S^2)^T with chi_j = Delta_j X - h a_{j-1}.
// With no drift given chi_j = Delta_j X.
Eigen::MatrixXd w_gamma_hat(const SamplePath& path, const Coefficient& scale,
                            std::span<const double> gamma,
                            const Coefficient* drift = nullptr,
                            std::span<const double> alpha = {});

// True when the symmetric matrix is not positive definite or its condition
// number exceeds kMaxCondition.
bool is_singular(const Eigen::MatrixXd& m);

// Everything the scale-stage criteria need, computed before any drift is fit.
struct ScaleFit {
  std::string name;
  std::vector<double> gamma;
  double h1_value = 0.0;
  Eigen::MatrixXd gamma_gamma_hat;
  Eigen::MatrixXd w_gamma_hat;  // chi = Delta X at this stage
  double nu2_hat = 0.0;
  double nu4_hat = 0.0;
  bool converged = false;
  bool boundary_hit = false;
  std::size_t n = 0;
  double h = 0.0;

  std::size_t p_gamma() const { return gamma.size(); }
  double horizon() const { return static_cast<double>(n) * h; }
};

struct DriftFit {
  std::string name;
  std::vector<double> alpha;
  double h2_value = 0.0;
  bool converged = false;
  bool boundary_hit = false;

  std::size_t p_alpha() const { return alpha.size(); }
};

// argmax of H1 over the scale box.
ScaleFit fit_scale(const SamplePath& path, const Coefficient& scale, const OptConfig& cfg = {});

// argmax of H2(.; gamma_hat) over the drift box.
DriftFit fit_drift(const SamplePath& path, const CandidateModel& model,
                   std::span<const double> gamma_hat, const OptConfig& cfg = {});

struct EmpiricalMatrices {
  Eigen::MatrixXd gamma_gamma;   // p_gamma x p_gamma
  Eigen::MatrixXd gamma_alpha;   // p_alpha x p_alpha
  Eigen::MatrixXd w_gamma;       // p_gamma x p_gamma
  Eigen::MatrixXd w_alphagamma;  // p_alpha x p_gamma
  Eigen::MatrixXd sigma;         // p x p, ordered (alpha, gamma)
  Eigen::MatrixXd v;             // Gamma^{-1} Sigma Gamma^{-1}
};

// Throws NumericalError when Gamma_alpha or Gamma_gamma is singular.
EmpiricalMatrices empirical_matrices(const SamplePath& path, const CandidateModel& model,
                                     std::span<const double> gamma,
                                     std::span<const double> alpha);

struct FitResult {
  std::string scale_name;
  std::string drift_name;
  std::vector<double> gamma_hat;
  std::vector<double> alpha_hat;
  double h1_value = 0.0;
  double h2_value = 0.0;
  Eigen::MatrixXd gamma_gamma_hat;
  Eigen::MatrixXd gamma_alpha_hat;
  Eigen::MatrixXd w_gamma_hat;
  Eigen::MatrixXd w_alphagamma_hat;
  Eigen::MatrixXd v_hat;  // empty when Gamma-hat is singular
  double nu2_hat = 0.0;
  double nu4_hat = 0.0;
  bool converged_gamma = false;
  bool converged_alpha = false;
  bool boundary_hit_gamma = false;
  bool boundary_hit_alpha = false;
  std::optional<std::string> matrix_error;
  ParamBox gamma_box;
  ParamBox alpha_box;
  std::size_t n = 0;
  double h = 0.0;

  double horizon() const { return static_cast<double>(n) * h; }
  std::size_t p_gamma() const { return gamma_hat.size(); }
  std::size_t p_alpha() const { return alpha_hat.size(); }
  // Scale-stage view using the drift-compensated W_gamma.
  ScaleFit scale_view() const;
};

FitResult fit(const SamplePath& path, const CandidateModel& model, const OptConfig& cfg = {});
FitResult assemble_fit(const SamplePath& path, const CandidateModel& model, const ScaleFit& sf,
                       const DriftFit& df);

nlohmann::json to_json(const FitResult& fit);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);

struct Interval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool degenerate = false;  // zero variance
};

// theta_k +/- z sqrt(V_kk / T) for theta = (alpha, gamma). Throws
// NumericalError when V-hat is missing or not positive semidefinite.
std::vector<Interval> confidence_interval(const FitResult& fit, double level = 0.95);

}  // namespace gqic

#endif  // GQIC_ESTIMATOR_HPP_
