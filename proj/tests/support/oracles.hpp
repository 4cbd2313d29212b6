#ifndef GQIC_TESTS_ORACLES_HPP_
#define GQIC_TESTS_ORACLES_HPP_

// Independent reference computations used by the unit and acceptance tests.
// Everything here is written out term by term in long double, without calling
// into the library's GQLF code.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "gqic/model.hpp"
#include "gqic/sde.hpp"

namespace gqic::oracle {

inline long double naive_h1(const SamplePath& p, const Coefficient& scale,
                            std::span<const double> gamma) {
  long double sum = 0.0L;
  const long double h = p.h;
  for (std::size_t j = 1; j <= p.n(); ++j) {
    const long double c = scale(p.values[j - 1], gamma);
    const long double s = c * c;
    const long double dx = static_cast<long double>(p.values[j]) - p.values[j - 1];
    sum += std::log(2.0L * std::numbers::pi_v<long double> * h * s) + dx * dx / (h * s);
  }
  return -0.5L * sum;
}

inline long double naive_h2(const SamplePath& p, const Coefficient& drift,
                            std::span<const double> alpha, const Coefficient& scale,
                            std::span<const double> gamma) {
  long double sum = 0.0L;
  const long double h = p.h;
  for (std::size_t j = 1; j <= p.n(); ++j) {
    const long double c = scale(p.values[j - 1], gamma);
    const long double s = c * c;
    const long double a = drift(p.values[j - 1], alpha);
    const long double dx = static_cast<long double>(p.values[j]) - p.values[j - 1];
    sum += dx * a / s - 0.5L * h * a * a / s;
  }
  return sum;
}

// Scale1 has S = gamma^2 constant, so H1 is maximized at
// gamma^2 = (nh)^{-1} sum dX^2.
inline double scale1_closed_form(const SamplePath& p) {
  long double ss = 0.0L;
  for (std::size_t j = 1; j <= p.n(); ++j) {
    const long double dx = static_cast<long double>(p.values[j]) - p.values[j - 1];
    ss += dx * dx;
  }
  return static_cast<double>(std::sqrt(ss / (static_cast<long double>(p.n()) * p.h)));
}

// Drift2 a = -alpha x is linear in alpha: weighted least squares
// alpha = -sum(dX x / S) / (h sum(x^2 / S)).
inline double drift2_closed_form(const SamplePath& p, const Coefficient& scale,
                                 std::span<const double> gamma) {
  long double num = 0.0L, den = 0.0L;
  for (std::size_t j = 1; j <= p.n(); ++j) {
    const long double x = p.values[j - 1];
    const long double c = scale(p.values[j - 1], gamma);
    const long double s = c * c;
    const long double dx = static_cast<long double>(p.values[j]) - p.values[j - 1];
    num += dx * x / s;
    den += x * x / s;
  }
  return static_cast<double>(-num / (p.h * den));
}

// Sample mean, variance and third/fourth cumulants with standard errors from
// their influence functions.
struct SampleCumulants {
  double k[4]{};
  double se[4]{};
};

inline SampleCumulants sample_cumulants(const std::vector<double>& x) {
  const auto n = static_cast<long double>(x.size());
  long double mean = 0.0L;
  for (double v : x) mean += v;
  mean /= n;
  long double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const long double d = v - mean;
    const long double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  SampleCumulants out;
  out.k[0] = static_cast<double>(mean);
  out.k[1] = static_cast<double>(m2);
  out.k[2] = static_cast<double>(m3);
  out.k[3] = static_cast<double>(m4 - 3 * m2 * m2);

  long double var[4]{};
  for (double v : x) {
    const long double d = v - mean;
    const long double d2 = d * d;
    const long double if2 = d2 - m2;
    const long double inf[4] = {d, if2, d2 * d - m3 - 3 * m2 * d,
                                d2 * d2 - m4 - 4 * m3 * d - 6 * m2 * if2};
    for (int i = 0; i < 4; ++i) var[i] += inf[i] * inf[i];
  }
  for (int i = 0; i < 4; ++i) out.se[i] = static_cast<double>(std::sqrt(var[i] / n) / std::sqrt(n));
  return out;
}

inline double binomial_se(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

// P(chi^2_1 > t) = erfc(sqrt(t / 2)).
inline double chisq1_tail(double t) { return std::erfc(std::sqrt(t / 2.0)); }

}  // namespace gqic::oracle

#endif  // GQIC_TESTS_ORACLES_HPP_
