#include "gqic/limit_dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gqic/error.hpp"

namespace gqic {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_symmetric_psd(const MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.size() == 0)
    throw std::invalid_argument(std::string(what) + " must be a nonempty square matrix");
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + " has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument(std::string(what) + " must be symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::invalid_argument(std::string(what) + " must be positive semidefinite");
}

MatrixXd psd_sqrt(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  const VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

void validate_nesting(const NestingMap& map) {
  if (map.F.rows() < map.F.cols() || map.F.cols() < 0)
    throw std::invalid_argument("nesting map: F must be p_large x p_small with p_small <= p_large");
  if (map.c.size() != map.F.rows())
    throw std::invalid_argument("nesting map: offset length must equal p_large");
  if (map.F.cols() > 0) {
    const MatrixXd ftf = map.F.transpose() * map.F;
    if ((ftf - MatrixXd::Identity(ftf.rows(), ftf.cols())).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("nesting map: F must have orthonormal columns");
  }
}

Eigen::VectorXd nesting_eigenvalues(const LimitInputs& in, const NestingMap& map) {
  check_symmetric_psd(in.Gamma, "Gamma");
  check_symmetric_psd(in.W, "W");
  validate_nesting(map);
  const auto p = in.Gamma.rows();
  if (in.W.rows() != p || map.F.rows() != p)
    throw std::invalid_argument("nesting_eigenvalues: dimensions of Gamma, W and F disagree");

  Eigen::LDLT<MatrixXd> ldlt(in.Gamma);
  Eigen::SelfAdjointEigenSolver<MatrixXd> ges(in.Gamma, Eigen::EigenvaluesOnly);
  if (!(ges.eigenvalues().minCoeff() > 1e-12 * ges.eigenvalues().maxCoeff()))
    throw NumericalError("nesting_eigenvalues: Gamma is singular");
  MatrixXd g = ldlt.solve(MatrixXd::Identity(p, p));
  if (map.F.cols() > 0) {
    const MatrixXd ftgf = map.F.transpose() * in.Gamma * map.F;
    g -= map.F * ftgf.ldlt().solve(map.F.transpose());
  }
  g = 0.5 * (g + g.transpose());
  const MatrixXd ws = psd_sqrt(in.W);
  MatrixXd q = ws * g * ws;
  q = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(q, Eigen::EigenvaluesOnly);
  VectorXd lam = es.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (lam(k) < -1e-10 * scale)
      throw NumericalError("nesting_eigenvalues: negative eigenvalue " + std::to_string(lam(k)));
    lam(k) = std::max(lam(k), 0.0);
    // Round-off around an exact zero.
    if (lam(k) < 1e-12 * scale) lam(k) = 0.0;
  }
  return lam;
}

TailEstimate weighted_chisq_tail(const Eigen::VectorXd& lambda, double threshold,
                                 std::size_t n_mc, RngStream& rng) {
  if (n_mc < 10000) throw std::invalid_argument("weighted_chisq_tail: n_mc must be at least 1e4");
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (!(lambda(k) >= 0.0)) throw std::invalid_argument("weighted_chisq_tail: weights must be >= 0");
  const double total = lambda.sum();
  if (total == 0.0) return {threshold < 0.0 ? 1.0 : 0.0, 0.0};
  if (threshold < 0.0) return {1.0, 0.0};
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    double q = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      if (lambda(k) == 0.0) continue;
      const double z = rng.normal();
      q += lambda(k) * z * z;
    }
    if (q > threshold) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n_mc);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n_mc))};
}

double scale_penalty_threshold(const Eigen::MatrixXd& gamma_large, const Eigen::MatrixXd& w_large,
                               const Eigen::MatrixXd& gamma_small, const Eigen::MatrixXd& w_small) {
  return 2.0 * gamma_large.ldlt().solve(w_large).trace() -
         2.0 * gamma_small.ldlt().solve(w_small).trace();
}

TailEstimate asymptotic_selection_prob(const LimitInputs& in, const NestingMap& map,
                                       LimitKind kind, std::size_t n_mc, RngStream& rng) {
  if (kind == LimitKind::Drift) {
    LimitInputs d{in.Gamma, in.Gamma,
                  2.0 * static_cast<double>(map.F.rows() - map.F.cols())};
    if (map.F.rows() == map.F.cols()) return {0.0, 0.0};
    return weighted_chisq_tail(nesting_eigenvalues(d, map), d.penalty_threshold, n_mc, rng);
  }
  return weighted_chisq_tail(nesting_eigenvalues(in, map), in.penalty_threshold, n_mc, rng);
}

}  // namespace gqic
