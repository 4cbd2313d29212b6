#ifndef GQIC_MODEL_HPP_
#define GQIC_MODEL_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gqic {

// Closed, bounded box [lo_k, hi_k] per coordinate.
class ParamBox {
 public:
  ParamBox() = default;
  ParamBox(std::vector<double> lo, std::vector<double> hi);

  std::size_t dim() const { return lo_.size(); }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  double width(std::size_t k) const { return hi_[k] - lo_[k]; }
  double volume() const;

  bool contains(std::span<const double> theta) const;
  std::vector<double> clamp(std::span<const double> theta) const;
  void clamp_in_place(std::span<double> theta) const;

  bool operator==(const ParamBox&) const = default;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

using CoefficientEval = std::function<double(double x, std::span<const double> theta)>;
using CoefficientGrad =
    std::function<void(double x, std::span<const double> theta, std::span<double> out)>;

// A parametric coefficient x -> f(x, theta). Coefficients are immutable
// closures; the gradient is optional and falls back to finite differences.
struct Coefficient {
  std::string name;
  std::size_t dim = 0;
  ParamBox box;
  CoefficientEval eval;
  CoefficientGrad grad;

  double operator()(double x, std::span<const double> theta) const { return eval(x, theta); }
  bool has_grad() const { return static_cast<bool>(grad); }
};

struct CandidateModel {
  Coefficient scale;  // c(x, gamma)
  Coefficient drift;  // a(x, alpha)

  std::size_t p_gamma() const { return scale.dim; }
  std::size_t p_alpha() const { return drift.dim; }
  std::size_t p() const { return p_gamma() + p_alpha(); }
  std::string label() const { return scale.name + "+" + drift.name; }
};

// Built-in candidates: Scale1..Scale4, Drift1..Drift3.
Coefficient registry(std::string_view name);
std::vector<std::string> registry_names();
bool is_scale_name(std::string_view name);
bool is_drift_name(std::string_view name);

// Same coefficient with a replaced parameter box.
Coefficient with_box(Coefficient coef, ParamBox box);

// Affine embedding theta_large = F theta_small + c with F^T F = I.
struct NestingMap {
  Eigen::MatrixXd F;
  Eigen::VectorXd c;
};

// Nesting of one registry coefficient in another, if any (e.g. Scale2 in
// Scale3 via gamma_3 = (gamma_2, 0)).
std::optional<NestingMap> registry_nesting(std::string_view small, std::string_view large);

// Analytic gradient if available, otherwise central differences with step
// eps^{1/3} max(1, |theta_k|); stencils are clamped to the box.
std::vector<double> grad_or_fd(const Coefficient& coef, double x, std::span<const double> theta);
std::vector<double> finite_difference_grad(const Coefficient& coef, double x,
                                           std::span<const double> theta);

}  // namespace gqic

#endif  // GQIC_MODEL_HPP_
