#include "gqic/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gqic/error.hpp"

namespace gqic {

ParamBox::ParamBox(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw std::invalid_argument("ParamBox: lo/hi size mismatch");
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (!std::isfinite(lo_[k]) || !std::isfinite(hi_[k]) || !(lo_[k] < hi_[k]))
      throw std::invalid_argument("ParamBox: each coordinate needs finite lo < hi");
  }
}

double ParamBox::volume() const {
  double v = 1.0;
  for (std::size_t k = 0; k < dim(); ++k) v *= width(k);
  return v;
}

bool ParamBox::contains(std::span<const double> theta) const {
  if (theta.size() != dim()) return false;
  for (std::size_t k = 0; k < dim(); ++k)
    if (!(theta[k] >= lo_[k] && theta[k] <= hi_[k])) return false;
  return true;
}

std::vector<double> ParamBox::clamp(std::span<const double> theta) const {
  std::vector<double> out(theta.begin(), theta.end());
  clamp_in_place(out);
  return out;
}

void ParamBox::clamp_in_place(std::span<double> theta) const {
  for (std::size_t k = 0; k < dim(); ++k) theta[k] = std::clamp(theta[k], lo_[k], hi_[k]);
}

namespace {

constexpr double kScaleLo = 0.01;
constexpr double kScaleHi = 20.0;
constexpr double kFreeLo = -20.0;
constexpr double kDriftLo = -10.0;
constexpr double kDriftHi = 10.0;

ParamBox drift_box(std::size_t p) {
  return ParamBox(std::vector<double>(p, kDriftLo), std::vector<double>(p, kDriftHi));
}

Coefficient make_scale(std::string_view name) {
  Coefficient c;
  c.name = std::string(name);
  if (name == "Scale1") {
    c.dim = 1;
    c.box = ParamBox({kScaleLo}, {kScaleHi});
    c.eval = [](double, std::span<const double> g) { return g[0]; };
    c.grad = [](double, std::span<const double>, std::span<double> out) { out[0] = 1.0; };
  } else if (name == "Scale2") {
    c.dim = 1;
    c.box = ParamBox({kScaleLo}, {kScaleHi});
    c.eval = [](double x, std::span<const double> g) { return g[0] / (1.0 + x * x); };
    c.grad = [](double x, std::span<const double>, std::span<double> out) {
      out[0] = 1.0 / (1.0 + x * x);
    };
  } else if (name == "Scale3") {
    // The quadratic coefficient of the true model is zero, so its range
    // straddles zero.
    c.dim = 2;
    c.box = ParamBox({kScaleLo, kFreeLo}, {kScaleHi, kScaleHi});
    c.eval = [](double x, std::span<const double> g) {
      const double x2 = x * x;
      return (g[0] + g[1] * x2) / (1.0 + x2);
    };
    c.grad = [](double x, std::span<const double>, std::span<double> out) {
      const double x2 = x * x;
      out[0] = 1.0 / (1.0 + x2);
      out[1] = x2 / (1.0 + x2);
    };
  } else if (name == "Scale4") {
    c.dim = 3;
    c.box = ParamBox({kScaleLo, kFreeLo, kFreeLo}, {kScaleHi, kScaleHi, kScaleHi});
    c.eval = [](double x, std::span<const double> g) {
      const double x2 = x * x;
      return (g[0] + g[1] * x + g[2] * x2) / (1.0 + x2);
    };
    c.grad = [](double x, std::span<const double>, std::span<double> out) {
      const double x2 = x * x;
      const double d = 1.0 / (1.0 + x2);
      out[0] = d;
      out[1] = x * d;
      out[2] = x2 * d;
    };
  } else {
    throw std::invalid_argument("unknown scale coefficient: " + std::string(name));
  }
  return c;
}

Coefficient make_drift(std::string_view name) {
  Coefficient c;
  c.name = std::string(name);
  if (name == "Drift1") {
    c.dim = 1;
    c.eval = [](double, std::span<const double> a) { return -a[0]; };
    c.grad = [](double, std::span<const double>, std::span<double> out) { out[0] = -1.0; };
  } else if (name == "Drift2") {
    c.dim = 1;
    c.eval = [](double x, std::span<const double> a) { return -a[0] * x; };
    c.grad = [](double x, std::span<const double>, std::span<double> out) { out[0] = -x; };
  } else if (name == "Drift3") {
    c.dim = 2;
    c.eval = [](double x, std::span<const double> a) { return -a[0] * x - a[1]; };
    c.grad = [](double x, std::span<const double>, std::span<double> out) {
      out[0] = -x;
      out[1] = -1.0;
    };
  } else {
    throw std::invalid_argument("unknown drift coefficient: " + std::string(name));
  }
  c.box = drift_box(c.dim);
  return c;
}

NestingMap unit_columns(std::size_t large, std::initializer_list<std::size_t> cols) {
  NestingMap m;
  m.F = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(large),
                              static_cast<Eigen::Index>(cols.size()));
  Eigen::Index j = 0;
  for (auto row : cols) m.F(static_cast<Eigen::Index>(row), j++) = 1.0;
  m.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(large));
  return m;
}

}  // namespace

bool is_scale_name(std::string_view name) {
  return name == "Scale1" || name == "Scale2" || name == "Scale3" || name == "Scale4";
}

bool is_drift_name(std::string_view name) {
  return name == "Drift1" || name == "Drift2" || name == "Drift3";
}

Coefficient registry(std::string_view name) {
  if (is_scale_name(name)) return make_scale(name);
  if (is_drift_name(name)) return make_drift(name);
  throw std::invalid_argument("unknown coefficient name: " + std::string(name));
}

std::vector<std::string> registry_names() {
  return {"Scale1", "Scale2", "Scale3", "Scale4", "Drift1", "Drift2", "Drift3"};
}

Coefficient with_box(Coefficient coef, ParamBox box) {
  if (box.dim() != coef.dim) throw std::invalid_argument("with_box: dimension mismatch");
  coef.box = std::move(box);
  return coef;
}

std::optional<NestingMap> registry_nesting(std::string_view small, std::string_view large) {
  // Scale1 (constant) is not nested in Scale2..4 since those all decay in x
  // unless a higher-order coefficient compensates; Scale1 = Scale3 with
  // gamma_31 = gamma_32 and that is not an axis-aligned embedding.
  if (small == large) {
    const auto p = registry(small).dim;
    NestingMap m;
    m.F = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    m.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    return m;
  }
  if (small == "Scale2" && large == "Scale3") return unit_columns(2, {0});
  if (small == "Scale2" && large == "Scale4") return unit_columns(3, {0});
  if (small == "Scale3" && large == "Scale4") return unit_columns(3, {0, 2});
  if (small == "Drift1" && large == "Drift3") return unit_columns(2, {1});
  if (small == "Drift2" && large == "Drift3") return unit_columns(2, {0});
  return std::nullopt;
}

std::vector<double> finite_difference_grad(const Coefficient& coef, double x,
                                           std::span<const double> theta) {
  const double eps = std::cbrt(std::numeric_limits<double>::epsilon());
  std::vector<double> t(theta.begin(), theta.end());
  std::vector<double> out(coef.dim);
  for (std::size_t k = 0; k < coef.dim; ++k) {
    const double step = eps * std::max(1.0, std::abs(theta[k]));
    const double up = std::min(theta[k] + step, coef.box.hi()[k]);
    const double dn = std::max(theta[k] - step, coef.box.lo()[k]);
    t[k] = up;
    const double fu = coef(x, t);
    t[k] = dn;
    const double fd = coef(x, t);
    t[k] = theta[k];
    out[k] = (fu - fd) / (up - dn);
    if (!std::isfinite(out[k]))
      throw NumericalError("non-finite finite-difference gradient of " + coef.name);
  }
  return out;
}

std::vector<double> grad_or_fd(const Coefficient& coef, double x, std::span<const double> theta) {
  if (theta.size() != coef.dim) throw std::invalid_argument("grad_or_fd: dimension mismatch");
  if (!coef.has_grad()) return finite_difference_grad(coef, x, theta);
  std::vector<double> out(coef.dim);
  coef.grad(x, theta, out);
  for (double g : out)
    if (!std::isfinite(g)) throw NumericalError("non-finite gradient of " + coef.name);
  return out;
}

}  // namespace gqic
