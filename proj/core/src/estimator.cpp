#include "gqic/estimator.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "gqic/error.hpp"

namespace gqic {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// dS/dgamma = 2 c dc at x.
void scale_terms(const Coefficient& scale, double x, std::span<const double> gamma, std::size_t j,
                 double& s, VectorXd& ds) {
  const double c = scale(x, gamma);
  s = c * c;
  if (!(s >= kDefaultSMin)) throw DegenerateScaleError(j, s);
  const auto dc = grad_or_fd(scale, x, gamma);
  for (Index k = 0; k < ds.size(); ++k) ds(k) = 2.0 * c * dc[static_cast<std::size_t>(k)];
}

std::string describe_condition(const char* what, const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  std::ostringstream os;
  os << what << " is singular (eigenvalues in [" << es.eigenvalues().minCoeff() << ", "
     << es.eigenvalues().maxCoeff() << "])";
  return os.str();
}

}  // namespace

bool is_singular(const MatrixXd& m) {
  if (m.size() == 0 || !m.allFinite()) return true;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  return !(lo > 0.0) || hi / lo > kMaxCondition;
}

NuHats nu_hats(const SamplePath& path, const Coefficient& scale, std::span<const double> gamma) {
  const auto s = scale_squared(path, scale, gamma);
  NuHats r;
  for (std::size_t j = 1; j <= path.n(); ++j) {
    const double dx = path.increment(j);
    const double q = dx * dx / s[j - 1];
    r.nu2 += q;
    r.nu4 += q * q;
  }
  const double t = path.horizon();
  r.nu2 /= t;
  r.nu4 /= t;
  return r;
}

MatrixXd gamma_gamma_hat(const SamplePath& path, const Coefficient& scale,
                         std::span<const double> gamma) {
  const auto p = static_cast<Index>(scale.dim);
  MatrixXd g = MatrixXd::Zero(p, p);
  VectorXd ds(p);
  double s = 0.0;
  for (std::size_t j = 1; j <= path.n(); ++j) {
    scale_terms(scale, path.values[j - 1], gamma, j, s, ds);
    const VectorXd u = ds / s;
    g.noalias() += u * u.transpose();
  }
  return g / (2.0 * static_cast<double>(path.n()));
}

MatrixXd w_gamma_hat(const SamplePath& path, const Coefficient& scale,
                     std::span<const double> gamma, const Coefficient* drift,
                     std::span<const double> alpha) {
  const auto p = static_cast<Index>(scale.dim);
  MatrixXd w = MatrixXd::Zero(p, p);
  VectorXd ds(p);
  double s = 0.0;
  const double h = path.h;
  for (std::size_t j = 1; j <= path.n(); ++j) {
    const double x = path.values[j - 1];
    scale_terms(scale, x, gamma, j, s, ds);
    double chi = path.values[j] - x;
    if (drift != nullptr) chi -= h * (*drift)(x, alpha);
    const VectorXd u = ds * (chi * chi / (s * s));
    w.noalias() += u * u.transpose();
  }
  return w / (4.0 * path.horizon());
}

ScaleFit fit_scale(const SamplePath& path, const Coefficient& scale, const OptConfig& cfg) {
  path.validate();
  if (scale.dim == 0) throw std::invalid_argument("fit_scale: scale coefficient has no parameters");
  const auto opt = maximize_in_box(
      [&](std::span<const double> g) { return h1(path, scale, g); }, scale.box, cfg);
  ScaleFit sf;
  sf.name = scale.name;
  sf.gamma = opt.x;
  sf.h1_value = opt.value;
  sf.converged = opt.converged;
  sf.boundary_hit = opt.boundary_hit;
  sf.n = path.n();
  sf.h = path.h;
  sf.gamma_gamma_hat = gamma_gamma_hat(path, scale, sf.gamma);
  sf.w_gamma_hat = w_gamma_hat(path, scale, sf.gamma);
  const auto nu = nu_hats(path, scale, sf.gamma);
  sf.nu2_hat = nu.nu2;
  sf.nu4_hat = nu.nu4;
  return sf;
}

DriftFit fit_drift(const SamplePath& path, const CandidateModel& model,
                   std::span<const double> gamma_hat, const OptConfig& cfg) {
  path.validate();
  if (model.drift.dim == 0)
    throw std::invalid_argument("fit_drift: every drift candidate needs at least one parameter");
  const auto s = scale_squared(path, model.scale, gamma_hat);
  const auto opt = maximize_in_box(
      [&](std::span<const double> a) { return h2_given_scale(path, model.drift, a, s); },
      model.drift.box, cfg);
  DriftFit df;
  df.name = model.drift.name;
  df.alpha = opt.x;
  df.h2_value = opt.value;
  df.converged = opt.converged;
  df.boundary_hit = opt.boundary_hit;
  return df;
}

EmpiricalMatrices empirical_matrices(const SamplePath& path, const CandidateModel& model,
                                     std::span<const double> gamma,
                                     std::span<const double> alpha) {
  const auto pg = static_cast<Index>(model.scale.dim);
  const auto pa = static_cast<Index>(model.drift.dim);
  if (static_cast<Index>(gamma.size()) != pg || static_cast<Index>(alpha.size()) != pa)
    throw std::invalid_argument("empirical_matrices: parameter dimension mismatch");
  for (double v : gamma)
    if (!std::isfinite(v)) throw std::invalid_argument("empirical_matrices: non-finite gamma");
  for (double v : alpha)
    if (!std::isfinite(v)) throw std::invalid_argument("empirical_matrices: non-finite alpha");

  EmpiricalMatrices m;
  m.gamma_gamma = MatrixXd::Zero(pg, pg);
  m.gamma_alpha = MatrixXd::Zero(pa, pa);
  m.w_gamma = MatrixXd::Zero(pg, pg);
  m.w_alphagamma = MatrixXd::Zero(pa, pg);
  VectorXd ds(pg);
  VectorXd da(pa);
  double s = 0.0;
  const double h = path.h;
  for (std::size_t j = 1; j <= path.n(); ++j) {
    const double x = path.values[j - 1];
    scale_terms(model.scale, x, gamma, j, s, ds);
    const auto dav = grad_or_fd(model.drift, x, alpha);
    for (Index k = 0; k < pa; ++k) da(k) = dav[static_cast<std::size_t>(k)];
    const double chi = path.values[j] - x - h * model.drift(x, alpha);

    const VectorXd u = ds / s;
    m.gamma_gamma.noalias() += u * u.transpose();
    m.gamma_alpha.noalias() += da * da.transpose() / s;
    const VectorXd wq = ds * (chi * chi / (s * s));
    m.w_gamma.noalias() += wq * wq.transpose();
    m.w_alphagamma.noalias() += (da * (chi / s)) * wq.transpose();
  }
  const double n = static_cast<double>(path.n());
  const double t = path.horizon();
  m.gamma_gamma /= 2.0 * n;
  m.gamma_alpha /= n;
  m.w_gamma /= 4.0 * t;
  m.w_alphagamma /= 2.0 * t;

  const Index p = pa + pg;
  m.sigma = MatrixXd::Zero(p, p);
  m.sigma.topLeftCorner(pa, pa) = m.gamma_alpha;
  m.sigma.topRightCorner(pa, pg) = m.w_alphagamma;
  m.sigma.bottomLeftCorner(pg, pa) = m.w_alphagamma.transpose();
  m.sigma.bottomRightCorner(pg, pg) = m.w_gamma;

  if (is_singular(m.gamma_alpha)) throw NumericalError(describe_condition("Gamma_alpha-hat", m.gamma_alpha));
  if (is_singular(m.gamma_gamma)) throw NumericalError(describe_condition("Gamma_gamma-hat", m.gamma_gamma));
  MatrixXd ginv = MatrixXd::Zero(p, p);
  ginv.topLeftCorner(pa, pa) = m.gamma_alpha.ldlt().solve(MatrixXd::Identity(pa, pa));
  ginv.bottomRightCorner(pg, pg) = m.gamma_gamma.ldlt().solve(MatrixXd::Identity(pg, pg));
  m.v = ginv * m.sigma * ginv;
  m.v = 0.5 * (m.v + m.v.transpose());
  return m;
}

ScaleFit FitResult::scale_view() const {
  ScaleFit sf;
  sf.name = scale_name;
  sf.gamma = gamma_hat;
  sf.h1_value = h1_value;
  sf.gamma_gamma_hat = gamma_gamma_hat;
  sf.w_gamma_hat = w_gamma_hat;
  sf.nu2_hat = nu2_hat;
  sf.nu4_hat = nu4_hat;
  sf.converged = converged_gamma;
  sf.boundary_hit = boundary_hit_gamma;
  sf.n = n;
  sf.h = h;
  return sf;
}

FitResult assemble_fit(const SamplePath& path, const CandidateModel& model, const ScaleFit& sf,
                       const DriftFit& df) {
  FitResult r;
  r.scale_name = model.scale.name;
  r.drift_name = model.drift.name;
  r.gamma_hat = sf.gamma;
  r.alpha_hat = df.alpha;
  r.h1_value = sf.h1_value;
  r.h2_value = df.h2_value;
  r.nu2_hat = sf.nu2_hat;
  r.nu4_hat = sf.nu4_hat;
  r.converged_gamma = sf.converged;
  r.converged_alpha = df.converged;
  r.boundary_hit_gamma = sf.boundary_hit;
  r.boundary_hit_alpha = df.boundary_hit;
  r.gamma_box = model.scale.box;
  r.alpha_box = model.drift.box;
  r.n = path.n();
  r.h = path.h;
  try {
    auto m = empirical_matrices(path, model, r.gamma_hat, r.alpha_hat);
    r.gamma_gamma_hat = std::move(m.gamma_gamma);
    r.gamma_alpha_hat = std::move(m.gamma_alpha);
    r.w_gamma_hat = std::move(m.w_gamma);
    r.w_alphagamma_hat = std::move(m.w_alphagamma);
    r.v_hat = std::move(m.v);
  } catch (const NumericalError& e) {
    // Keep the blocks that are still meaningful; V-hat stays empty.
    r.matrix_error = e.what();
    r.gamma_gamma_hat = gamma_gamma_hat(path, model.scale, r.gamma_hat);
    r.w_gamma_hat = w_gamma_hat(path, model.scale, r.gamma_hat, &model.drift, r.alpha_hat);
  }
  return r;
}

FitResult fit(const SamplePath& path, const CandidateModel& model, const OptConfig& cfg) {
  const auto sf = fit_scale(path, model.scale, cfg);
  const auto df = fit_drift(path, model, sf.gamma, cfg);
  return assemble_fit(path, model, sf, df);
}

nlohmann::json matrix_to_json(const MatrixXd& m) {
  auto out = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

namespace {
nlohmann::json box_json(const ParamBox& b) { return {{"lo", b.lo()}, {"hi", b.hi()}}; }
}  // namespace

nlohmann::json to_json(const FitResult& f) {
  nlohmann::json j;
  j["scale"] = f.scale_name;
  j["drift"] = f.drift_name;
  j["n"] = f.n;
  j["h"] = f.h;
  j["T"] = f.horizon();
  j["gamma_hat"] = f.gamma_hat;
  j["alpha_hat"] = f.alpha_hat;
  j["h1_value"] = f.h1_value;
  j["h2_value"] = f.h2_value;
  j["gamma_gamma_hat"] = matrix_to_json(f.gamma_gamma_hat);
  j["gamma_alpha_hat"] = matrix_to_json(f.gamma_alpha_hat);
  j["w_gamma_hat"] = matrix_to_json(f.w_gamma_hat);
  j["w_alphagamma_hat"] = matrix_to_json(f.w_alphagamma_hat);
  j["v_hat"] = matrix_to_json(f.v_hat);
  j["nu2_hat"] = f.nu2_hat;
  j["nu4_hat"] = f.nu4_hat;
  j["converged"] = {{"gamma", f.converged_gamma}, {"alpha", f.converged_alpha}};
  j["boundary_hit"] = {{"gamma", f.boundary_hit_gamma}, {"alpha", f.boundary_hit_alpha}};
  j["gamma_box"] = box_json(f.gamma_box);
  j["alpha_box"] = box_json(f.alpha_box);
  if (f.matrix_error) j["matrix_error"] = *f.matrix_error;
  return j;
}

std::vector<Interval> confidence_interval(const FitResult& f, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("confidence_interval: level must lie in (0, 1)");
  const auto p = static_cast<Index>(f.p_alpha() + f.p_gamma());
  if (f.v_hat.rows() != p || f.v_hat.cols() != p)
    throw NumericalError("confidence_interval: V-hat unavailable" +
                         (f.matrix_error ? ": " + *f.matrix_error : std::string()));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(f.v_hat, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, f.v_hat.cwiseAbs().maxCoeff());
  if (!f.v_hat.allFinite() || es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw NumericalError("confidence_interval: V-hat is not positive semidefinite");

  const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
  const double t = f.horizon();
  std::vector<Interval> out;
  auto push = [&](double est, Index k) {
    const double var = std::max(0.0, f.v_hat(k, k));
    const double half = z * std::sqrt(var / t);
    out.push_back({est, est - half, est + half, var == 0.0});
  };
  for (std::size_t k = 0; k < f.p_alpha(); ++k) push(f.alpha_hat[k], static_cast<Index>(k));
  for (std::size_t k = 0; k < f.p_gamma(); ++k)
    push(f.gamma_hat[k], static_cast<Index>(f.p_alpha() + k));
  return out;
}

}  // namespace gqic
