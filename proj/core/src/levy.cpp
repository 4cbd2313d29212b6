#include "gqic/levy.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gqic/error.hpp"

namespace gqic {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_all(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

double draw_once(const LevySpec& spec, double h, RngStream& rng) {
  return std::visit(
      overloaded{
          [&](const GaussianNoise&) { return std::sqrt(h) * rng.normal(); },
          [&](const NigNoise& p) {
            // Normal mean-variance mixture over an inverse-Gaussian clock:
            // V ~ IG(delta h / g, (delta h)^2), Z = mu h + beta V + sqrt(V) N.
            const double g = std::sqrt(p.alpha * p.alpha - p.beta * p.beta);
            const double dh = p.delta_rate * h;
            const double v = rng.inverse_gaussian(dh / g, dh * dh);
            return p.mu_rate * h + p.beta * v + std::sqrt(v) * rng.normal();
          },
          [&](const BilateralGammaNoise& p) {
            const double up = rng.gamma(p.shape_pos_rate * h) / p.rate_pos;
            const double down = rng.gamma(p.shape_neg_rate * h) / p.rate_neg;
            return up - down;
          }},
      spec);
}

}  // namespace

void validate(const LevySpec& spec) {
  std::visit(
      overloaded{
          [](const GaussianNoise&) {},
          [](const NigNoise& p) {
            if (!finite_all({p.alpha, p.beta, p.delta_rate, p.mu_rate}))
              throw std::invalid_argument("nig: parameters must be finite");
            if (!(p.alpha > std::abs(p.beta)))
              throw std::invalid_argument("nig: requires alpha > |beta|");
            if (!(p.delta_rate > 0.0))
              throw std::invalid_argument("nig: requires delta_rate > 0");
          },
          [](const BilateralGammaNoise& p) {
            if (!finite_all({p.shape_pos_rate, p.rate_pos, p.shape_neg_rate, p.rate_neg}))
              throw std::invalid_argument("bilateral gamma: parameters must be finite");
            if (!(p.shape_pos_rate > 0.0 && p.rate_pos > 0.0 && p.shape_neg_rate > 0.0 &&
                  p.rate_neg > 0.0))
              throw std::invalid_argument("bilateral gamma: shapes and rates must be positive");
          }},
      spec);
}

CumulantRates cumulant_rates(const LevySpec& spec) {
  validate(spec);
  return std::visit(
      overloaded{
          [](const GaussianNoise&) { return CumulantRates{0.0, 1.0, 0.0, 0.0}; },
          [](const NigNoise& p) {
            const double a2 = p.alpha * p.alpha;
            const double b = p.beta;
            const double g = std::sqrt(a2 - b * b);
            const double d = p.delta_rate;
            CumulantRates r;
            r.mean_rate = p.mu_rate + d * b / g;
            r.var_rate = d * a2 / std::pow(g, 3);
            r.nu3 = 3.0 * d * a2 * b / std::pow(g, 5);
            r.nu4 = 3.0 * d * a2 * (a2 + 4.0 * b * b) / std::pow(g, 7);
            return r;
          },
          [](const BilateralGammaNoise& p) {
            // kappa_r(Gamma(a, l)) = a (r-1)! / l^r; the negative side flips
            // the sign of odd cumulants.
            auto k = [](double a, double l, int r, double fact) {
              return a * fact / std::pow(l, r);
            };
            CumulantRates r;
            r.mean_rate = k(p.shape_pos_rate, p.rate_pos, 1, 1.0) -
                          k(p.shape_neg_rate, p.rate_neg, 1, 1.0);
            r.var_rate = k(p.shape_pos_rate, p.rate_pos, 2, 1.0) +
                         k(p.shape_neg_rate, p.rate_neg, 2, 1.0);
            r.nu3 = k(p.shape_pos_rate, p.rate_pos, 3, 2.0) -
                    k(p.shape_neg_rate, p.rate_neg, 3, 2.0);
            r.nu4 = k(p.shape_pos_rate, p.rate_pos, 4, 6.0) +
                    k(p.shape_neg_rate, p.rate_neg, 4, 6.0);
            return r;
          }},
      spec);
}

std::optional<std::string> standardization_warning(const LevySpec& spec, double tol) {
  const auto r = cumulant_rates(spec);
  if (std::abs(r.mean_rate) <= tol && std::abs(r.var_rate - 1.0) <= tol) return std::nullopt;
  std::ostringstream os;
  os << describe(spec) << " is not standardized: E[Z_1] = " << r.mean_rate
     << ", Var[Z_1] = " << r.var_rate;
  return os.str();
}

std::string kind_name(const LevySpec& spec) {
  return std::visit(overloaded{[](const GaussianNoise&) { return std::string("gaussian"); },
                               [](const NigNoise&) { return std::string("nig"); },
                               [](const BilateralGammaNoise&) {
                                 return std::string("bilateral_gamma");
                               }},
                    spec);
}

std::string describe(const LevySpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const GaussianNoise&) { os << "Gaussian"; },
                        [&](const NigNoise& p) {
                          os << "NIG(" << p.alpha << ", " << p.beta << ", " << p.delta_rate
                             << "t, " << p.mu_rate << "t)";
                        },
                        [&](const BilateralGammaNoise& p) {
                          os << "bGamma(" << p.shape_pos_rate << "t, " << p.rate_pos << ", "
                             << p.shape_neg_rate << "t, " << p.rate_neg << ")";
                        }},
             spec);
  return os.str();
}

double draw_increment(const LevySpec& spec, double h, RngStream& rng) {
  double z = draw_once(spec, h, rng);
  if (std::isfinite(z)) return z;
  z = draw_once(spec, h, rng);
  if (std::isfinite(z)) return z;
  std::ostringstream os;
  os << "non-finite increment from " << describe(spec) << " at h = " << h
     << " (seed " << rng.seed() << ", stream " << rng.stream_id() << ") after one retry";
  throw NumericalError(os.str());
}

std::vector<double> increments(const LevySpec& spec, std::size_t n, double h, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("increments: n must be at least 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("increments: h must be positive");
  validate(spec);
  std::vector<double> out(n);
  for (auto& z : out) z = draw_increment(spec, h, rng);
  return out;
}

}  // namespace gqic
