#include "gqic/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "gqic/error.hpp"

namespace gqic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct ScaleName {
  ScaleCriterionKind kind;
  std::string_view name;
};
constexpr ScaleName kScaleNames[] = {
    {ScaleCriterionKind::GQAIC1, "GQAIC1"},
    {ScaleCriterionKind::GQAIC1_SCALAR, "GQAIC1_SCALAR"},
    {ScaleCriterionKind::GQAIC1_TRUNC, "GQAIC1_TRUNC"},
    {ScaleCriterionKind::GQAIC1_MOD, "GQAIC1_MOD"},
    {ScaleCriterionKind::GQBIC1, "GQBIC1"},
    {ScaleCriterionKind::GQBIC1_SHARP, "GQBIC1_SHARP"},
    {ScaleCriterionKind::FAIC1, "FAIC1"},
};

struct DriftName {
  DriftCriterionKind kind;
  std::string_view name;
};
constexpr DriftName kDriftNames[] = {
    {DriftCriterionKind::GQAIC2, "GQAIC2"},
    {DriftCriterionKind::GQBIC2, "GQBIC2"},
    {DriftCriterionKind::FAIC2, "FAIC2"},
};

double trace_solve(const Eigen::MatrixXd& g, const Eigen::MatrixXd& w) {
  return g.ldlt().solve(w).trace();
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

using LogIntegrand = std::function<double(std::span<const double>)>;

double safe_eval(const LogIntegrand& f, std::span<const double> x) {
  try {
    const double v = f(x);
    return std::isnan(v) ? kNegInf : v;
  } catch (const NumericalError&) {
    return kNegInf;
  }
}

// Panels with breakpoints at mode +/- sigma 2^k, clipped to [lo, hi].
std::vector<double> breakpoints(double lo, double hi, double mode, double sigma) {
  std::vector<double> b{lo, hi};
  mode = std::clamp(mode, lo, hi);
  if (mode > lo && mode < hi) b.push_back(mode);
  for (double d = sigma; d < hi - lo; d *= 2.0) {
    if (mode - d > lo) b.push_back(mode - d);
    if (mode + d < hi) b.push_back(mode + d);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

struct AxisRule {
  std::vector<double> x;
  std::vector<double> log_w;
};

AxisRule axis_rule(double lo, double hi, double mode, double sigma, std::size_t nodes) {
  const auto& gl = gauss_legendre(nodes);
  const auto bp = breakpoints(lo, hi, mode, sigma);
  AxisRule r;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double mid = 0.5 * (bp[i] + bp[i + 1]);
    const double half = 0.5 * (bp[i + 1] - bp[i]);
    for (std::size_t k = 0; k < gl.x.size(); ++k) {
      r.x.push_back(mid + half * gl.x[k]);
      r.log_w.push_back(std::log(gl.w[k] * half));
    }
  }
  return r;
}

// log int exp{f} over the box by composite Gauss-Legendre with max-recentering.
double log_integral(const LogIntegrand& f, const ParamBox& box, const std::vector<double>& mode,
                    const std::vector<double>& sigma, std::size_t nodes) {
  const std::size_t p = box.dim();
  if (p == 0 || p > 2) throw std::invalid_argument("free energy: quadrature supports 1 or 2 parameters");
  std::vector<AxisRule> rules;
  for (std::size_t k = 0; k < p; ++k)
    rules.push_back(axis_rule(box.lo()[k], box.hi()[k], mode[k], sigma[k], nodes));

  std::vector<double> terms;
  std::vector<double> x(p);
  if (p == 1) {
    terms.reserve(rules[0].x.size());
    for (std::size_t i = 0; i < rules[0].x.size(); ++i) {
      x[0] = rules[0].x[i];
      terms.push_back(safe_eval(f, x) + rules[0].log_w[i]);
    }
  } else {
    terms.reserve(rules[0].x.size() * rules[1].x.size());
    for (std::size_t i = 0; i < rules[0].x.size(); ++i) {
      x[0] = rules[0].x[i];
      for (std::size_t j = 0; j < rules[1].x.size(); ++j) {
        x[1] = rules[1].x[j];
        terms.push_back(safe_eval(f, x) + rules[0].log_w[i] + rules[1].log_w[j]);
      }
    }
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(top)) throw NumericalError("free energy: integrand is zero at every node");
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw NumericalError("free energy: quadrature sum underflowed after recentering");
  return top + std::log(sum);
}

std::vector<double> widths_from_hessian(const Eigen::MatrixXd& hess, const ParamBox& box) {
  std::vector<double> s(box.dim());
  for (std::size_t k = 0; k < box.dim(); ++k) {
    const double c = -hess(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    s[k] = (c > 0.0 && std::isfinite(c)) ? 1.0 / std::sqrt(c) : box.width(k) / 16.0;
    s[k] = std::min(s[k], box.width(k));
  }
  return s;
}

double log_prior_value(const FreeEnergyOptions& opt, const ParamBox& box,
                       std::span<const double> x) {
  return opt.log_prior ? opt.log_prior(x) : -std::log(box.volume());
}

}  // namespace

std::string_view to_string(ScaleCriterionKind k) {
  for (const auto& e : kScaleNames)
    if (e.kind == k) return e.name;
  return "?";
}

std::string_view to_string(DriftCriterionKind k) {
  for (const auto& e : kDriftNames)
    if (e.kind == k) return e.name;
  return "?";
}

std::optional<ScaleCriterionKind> parse_scale_kind(std::string_view s) {
  for (const auto& e : kScaleNames)
    if (e.name == s) return e.kind;
  return std::nullopt;
}

std::optional<DriftCriterionKind> parse_drift_kind(std::string_view s) {
  for (const auto& e : kDriftNames)
    if (e.name == s) return e.kind;
  return std::nullopt;
}

const std::vector<ScaleCriterionKind>& all_scale_kinds() {
  static const std::vector<ScaleCriterionKind> v = [] {
    std::vector<ScaleCriterionKind> out;
    for (const auto& e : kScaleNames) out.push_back(e.kind);
    return out;
  }();
  return v;
}

const std::vector<DriftCriterionKind>& all_drift_kinds() {
  static const std::vector<DriftCriterionKind> v = {
      DriftCriterionKind::GQAIC2, DriftCriterionKind::GQBIC2, DriftCriterionKind::FAIC2};
  return v;
}

CriterionValue scale_criterion(const ScaleFit& fit, ScaleCriterionKind kind, double trunc_kappa) {
  const double p = static_cast<double>(fit.p_gamma());
  const double n = static_cast<double>(fit.n);
  const double h = fit.h;
  const double t = fit.horizon();
  const double base = -2.0 * fit.h1_value;
  CriterionValue out;
  switch (kind) {
    case ScaleCriterionKind::GQAIC1:
      if (is_singular(fit.gamma_gamma_hat))
        throw NumericalError("GQAIC1: Gamma_gamma-hat is singular for " + fit.name +
                             "; use GQAIC1_TRUNC");
      out.value = base + (2.0 / h) * trace_solve(fit.gamma_gamma_hat, fit.w_gamma_hat);
      break;
    case ScaleCriterionKind::GQAIC1_SCALAR:
      out.value = base + (p / h) * fit.nu4_hat;
      break;
    case ScaleCriterionKind::GQAIC1_TRUNC: {
      if (!(trunc_kappa > 0.0 && trunc_kappa < 1.0))
        throw std::invalid_argument("GQAIC1_TRUNC: kappa must lie in (0, 1)");
      const double bn = std::pow(t, -(1.0 - trunc_kappa) / 2.0);
      if (fit.gamma_gamma_hat.allFinite() && min_eigenvalue(fit.gamma_gamma_hat) >= bn) {
        out.value = base + (2.0 / h) * trace_solve(fit.gamma_gamma_hat, fit.w_gamma_hat);
      } else {
        out.value = base;
        out.truncated = true;
      }
      break;
    }
    case ScaleCriterionKind::GQAIC1_MOD:
      out.value = base + p * (fit.nu4_hat / h - fit.nu2_hat * fit.nu2_hat);
      break;
    case ScaleCriterionKind::GQBIC1:
      out.value = base + (p / h) * std::log(t);
      break;
    case ScaleCriterionKind::GQBIC1_SHARP:
      out.value = base + p * std::log(n);
      break;
    case ScaleCriterionKind::FAIC1:
      out.value = base + 2.0 * p;
      break;
  }
  return out;
}

double drift_criterion(double h2_value, std::size_t p_alpha, double horizon,
                       DriftCriterionKind kind) {
  const double p = static_cast<double>(p_alpha);
  const double base = -2.0 * h2_value;
  switch (kind) {
    case DriftCriterionKind::GQAIC2:
    case DriftCriterionKind::FAIC2:
      return base + 2.0 * p;
    case DriftCriterionKind::GQBIC2:
      return base + p * std::log(horizon);
  }
  return base;
}

const GaussLegendre& gauss_legendre(std::size_t nodes) {
  if (nodes == 0) throw std::invalid_argument("gauss_legendre: need at least one node");
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[nodes];
  if (!slot) {
    const auto m = static_cast<Eigen::Index>(nodes);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index k = 1; k < m; ++k) {
      const double kk = static_cast<double>(k);
      j(k, k - 1) = j(k - 1, k) = kk / std::sqrt(4.0 * kk * kk - 1.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    auto gl = std::make_unique<GaussLegendre>();
    for (Eigen::Index k = 0; k < m; ++k) {
      gl->x.push_back(es.eigenvalues()(k));
      const double v0 = es.eigenvectors()(0, k);
      gl->w.push_back(2.0 * v0 * v0);
    }
    slot = std::move(gl);
  }
  return *slot;
}

double free_energy_scale(const SamplePath& path, const Coefficient& scale, double b,
                         const FreeEnergyOptions& opt) {
  path.validate();
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("free_energy_scale: b must be positive");
  if (scale.dim > 2) throw std::invalid_argument("free_energy_scale: p_gamma must be at most 2");
  const ParamBox& box = scale.box;
  const LogIntegrand f = [&](std::span<const double> g) {
    return b * h1(path, scale, g) + log_prior_value(opt, box, g);
  };
  std::vector<double> mode;
  if (opt.mode) {
    mode = box.clamp(*opt.mode);
  } else {
    mode = maximize_in_box(f, box, opt.opt).x;
  }
  const auto sigma = widths_from_hessian(b * h1_hessian(path, scale, mode), box);
  const double li = log_integral(f, box, mode, sigma, opt.nodes);
  return -li / (static_cast<double>(path.n()) * b);
}

double free_energy_drift(const SamplePath& path, const CandidateModel& model,
                         std::span<const double> gamma_hat, const FreeEnergyOptions& opt) {
  path.validate();
  if (model.drift.dim > 2) throw std::invalid_argument("free_energy_drift: p_alpha must be at most 2");
  const ParamBox& box = model.drift.box;
  const auto s = scale_squared(path, model.scale, gamma_hat);
  const LogIntegrand f = [&](std::span<const double> a) {
    return h2_given_scale(path, model.drift, a, s) + log_prior_value(opt, box, a);
  };
  std::vector<double> mode;
  if (opt.mode) {
    mode = box.clamp(*opt.mode);
  } else {
    mode = maximize_in_box(f, box, opt.opt).x;
  }
  const auto sigma = widths_from_hessian(h2_hessian(path, model, mode, gamma_hat), box);
  const double li = log_integral(f, box, mode, sigma, opt.nodes);
  return -li / path.horizon();
}

double scale_expansion_residual(double f1, double h1_hat, std::size_t n, double b,
                                std::size_t p_gamma) {
  const double nb = static_cast<double>(n) * b;
  return nb * std::abs(f1 + h1_hat / static_cast<double>(n) -
                       static_cast<double>(p_gamma) / (2.0 * nb) * std::log(nb));
}

double drift_expansion_residual(double f2, double h2_hat, double horizon, std::size_t p_alpha) {
  return horizon * std::abs(f2 + h2_hat / horizon -
                            static_cast<double>(p_alpha) / (2.0 * horizon) * std::log(horizon));
}

}  // namespace gqic
