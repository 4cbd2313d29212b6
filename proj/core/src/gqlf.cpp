#include "gqic/gqlf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gqic/error.hpp"

namespace gqic {

namespace {

void check_dim(const Coefficient& c, std::span<const double> theta, const char* what) {
  if (theta.size() != c.dim) {
    throw std::invalid_argument(std::string(what) + ": parameter dimension " +
                                std::to_string(theta.size()) + " does not match " + c.name);
  }
}

double checked_s(const Coefficient& scale, double x, std::span<const double> gamma,
                 std::size_t j, double s_min) {
  const double c = scale(x, gamma);
  const double s = c * c;
  if (!(s >= s_min)) throw DegenerateScaleError(j, s);
  return s;
}

template <class GradFn>
Eigen::MatrixXd fd_jacobian_of_gradient(const ParamBox& box, std::span<const double> theta,
                                        GradFn&& grad) {
  const auto p = static_cast<Eigen::Index>(theta.size());
  const double eps = std::cbrt(std::numeric_limits<double>::epsilon());
  std::vector<double> t(theta.begin(), theta.end());
  Eigen::MatrixXd hess(p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const double step = eps * std::max(1.0, std::abs(theta[uk]));
    const double up = std::min(theta[uk] + step, box.hi()[uk]);
    const double dn = std::max(theta[uk] - step, box.lo()[uk]);
    t[uk] = up;
    const Eigen::VectorXd gu = grad(std::span<const double>(t));
    t[uk] = dn;
    const Eigen::VectorXd gd = grad(std::span<const double>(t));
    t[uk] = theta[uk];
    hess.col(k) = (gu - gd) / (up - dn);
  }
  Eigen::MatrixXd sym = 0.5 * (hess + hess.transpose());
  if (!sym.allFinite()) throw NumericalError("non-finite Hessian");
  return sym;
}

}  // namespace

std::vector<double> scale_squared(const SamplePath& path, const Coefficient& scale,
                                  std::span<const double> gamma, double s_min) {
  check_dim(scale, gamma, "scale_squared");
  const std::size_t n = path.n();
  std::vector<double> s(n);
  for (std::size_t j = 1; j <= n; ++j) s[j - 1] = checked_s(scale, path.values[j - 1], gamma, j, s_min);
  return s;
}

double h1(const SamplePath& path, const Coefficient& scale, std::span<const double> gamma,
          double s_min) {
  check_dim(scale, gamma, "h1");
  const std::size_t n = path.n();
  const double h = path.h;
  double log_sum = 0.0;
  double quad = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double s = checked_s(scale, path.values[j - 1], gamma, j, s_min);
    const double dx = path.values[j] - path.values[j - 1];
    log_sum += std::log(s);
    quad += dx * dx / s;
  }
  const double nn = static_cast<double>(n);
  return -0.5 * (nn * std::log(2.0 * std::numbers::pi * h) + log_sum + quad / h);
}

double h2_given_scale(const SamplePath& path, const Coefficient& drift,
                      std::span<const double> alpha, std::span<const double> s) {
  check_dim(drift, alpha, "h2");
  const std::size_t n = path.n();
  if (s.size() != n) throw std::invalid_argument("h2: scale vector length mismatch");
  const double h = path.h;
  double acc = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double a = drift(path.values[j - 1], alpha);
    const double dx = path.values[j] - path.values[j - 1];
    acc += (dx * a - 0.5 * h * a * a) / s[j - 1];
  }
  return acc;
}

double h2(const SamplePath& path, const CandidateModel& model, std::span<const double> alpha,
          std::span<const double> gamma, double s_min) {
  const auto s = scale_squared(path, model.scale, gamma, s_min);
  return h2_given_scale(path, model.drift, alpha, s);
}

double h2_star(const SamplePath& path, const CandidateModel& model, std::span<const double> alpha,
               std::span<const double> gamma, double s_min) {
  check_dim(model.drift, alpha, "h2_star");
  check_dim(model.scale, gamma, "h2_star");
  const std::size_t n = path.n();
  const double h = path.h;
  const double log2pih = std::log(2.0 * std::numbers::pi * h);
  double acc = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double x = path.values[j - 1];
    const double s = checked_s(model.scale, x, gamma, j, s_min);
    const double r = path.values[j] - x - model.drift(x, alpha) * h;
    acc += -0.5 * (log2pih + std::log(s) + r * r / (h * s));
  }
  return acc;
}

Eigen::VectorXd h1_gradient(const SamplePath& path, const Coefficient& scale,
                            std::span<const double> gamma, double s_min) {
  check_dim(scale, gamma, "h1_gradient");
  const auto p = static_cast<Eigen::Index>(scale.dim);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p);
  const double h = path.h;
  for (std::size_t j = 1; j <= path.n(); ++j) {
    const double x = path.values[j - 1];
    const double c = scale(x, gamma);
    const double s = c * c;
    if (!(s >= s_min)) throw DegenerateScaleError(j, s);
    const double dx = path.values[j] - x;
    const auto dc = grad_or_fd(scale, x, gamma);
    // dH1/dS = -1/2 (1/S - dx^2 / (h S^2)); dS = 2 c dc.
    const double w = -0.5 * (1.0 / s - dx * dx / (h * s * s)) * 2.0 * c;
    for (Eigen::Index k = 0; k < p; ++k) g(k) += w * dc[static_cast<std::size_t>(k)];
  }
  if (!g.allFinite()) throw NumericalError("non-finite h1 gradient");
  return g;
}

Eigen::MatrixXd h1_hessian(const SamplePath& path, const Coefficient& scale,
                           std::span<const double> gamma, double s_min) {
  return fd_jacobian_of_gradient(scale.box, gamma, [&](std::span<const double> t) {
    return h1_gradient(path, scale, t, s_min);
  });
}

Eigen::VectorXd h2_gradient(const SamplePath& path, const CandidateModel& model,
                            std::span<const double> alpha, std::span<const double> gamma,
                            double s_min) {
  check_dim(model.drift, alpha, "h2_gradient");
  const auto s = scale_squared(path, model.scale, gamma, s_min);
  const auto p = static_cast<Eigen::Index>(model.drift.dim);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p);
  const double h = path.h;
  for (std::size_t j = 1; j <= path.n(); ++j) {
    const double x = path.values[j - 1];
    const double a = model.drift(x, alpha);
    const double dx = path.values[j] - x;
    const auto da = grad_or_fd(model.drift, x, alpha);
    const double w = (dx - h * a) / s[j - 1];
    for (Eigen::Index k = 0; k < p; ++k) g(k) += w * da[static_cast<std::size_t>(k)];
  }
  if (!g.allFinite()) throw NumericalError("non-finite h2 gradient");
  return g;
}

Eigen::MatrixXd h2_hessian(const SamplePath& path, const CandidateModel& model,
                           std::span<const double> alpha, std::span<const double> gamma,
                           double s_min) {
  return fd_jacobian_of_gradient(model.drift.box, alpha, [&](std::span<const double> t) {
    return h2_gradient(path, model, t, gamma, s_min);
  });
}

}  // namespace gqic
