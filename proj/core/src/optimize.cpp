#include "gqic/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gqic/error.hpp"

namespace gqic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Run {
  std::vector<double> x;
  double value = -kInf;
  bool converged = false;
  std::size_t evals = 0;
};

class Evaluator {
 public:
  explicit Evaluator(const Objective& f) : f_(f) {}
  // Negated objective, +inf on failure.
  double operator()(std::span<const double> x) {
    ++count;
    double v;
    try {
      v = f_(x);
    } catch (const NumericalError&) {
      return kInf;
    }
    return std::isfinite(v) ? -v : kInf;
  }
  std::size_t count = 0;

 private:
  const Objective& f_;
};

bool better(double va, const std::vector<double>& a, double vb, const std::vector<double>& b) {
  if (va != vb) return va > vb;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Run nelder_mead(Evaluator& g, const ParamBox& box, std::vector<double> x0, double step_frac,
                std::size_t max_iter, double x_tol, double f_tol) {
  const std::size_t p = box.dim();
  const std::size_t before = g.count;
  box.clamp_in_place(x0);
  std::vector<std::vector<double>> v(p + 1, x0);
  for (std::size_t k = 0; k < p; ++k) {
    const double step = step_frac * box.width(k);
    v[k + 1][k] = (x0[k] + step <= box.hi()[k]) ? x0[k] + step : x0[k] - step;
  }
  std::vector<double> fv(p + 1);
  for (std::size_t i = 0; i <= p; ++i) fv[i] = g(v[i]);

  std::vector<std::size_t> idx(p + 1);
  std::vector<double> c(p), xr(p), xe(p), xc(p);
  auto point = [&](const std::vector<double>& base, double t, std::vector<double>& out) {
    // out = c + t (c - base), projected onto the box.
    for (std::size_t k = 0; k < p; ++k) out[k] = c[k] + t * (c[k] - base[k]);
    box.clamp_in_place(out);
  };

  bool converged = false;
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (fv[a] != fv[b]) return fv[a] < fv[b];
      return a < b;
    });
    const std::size_t best = idx.front();
    const std::size_t worst = idx.back();
    const std::size_t second = idx[p - 1];

    double xs = 0.0;
    for (std::size_t i = 0; i <= p; ++i)
      for (std::size_t k = 0; k < p; ++k)
        xs = std::max(xs, std::abs(v[i][k] - v[best][k]) / (1.0 + std::abs(v[best][k])));
    const double fs = fv[worst] - fv[best];
    if (std::isfinite(fv[best]) && xs <= x_tol && fs <= f_tol * (1.0 + std::abs(fv[best]))) {
      converged = true;
      break;
    }

    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i <= p; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < p; ++k) c[k] += v[i][k] / static_cast<double>(p);
    }

    point(v[worst], 1.0, xr);
    const double fr = g(xr);
    if (fr < fv[best]) {
      point(v[worst], 2.0, xe);
      const double fe = g(xe);
      if (fe < fr) {
        v[worst] = xe;
        fv[worst] = fe;
      } else {
        v[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      v[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    // Contraction, outside or inside.
    const bool outside = fr < fv[worst];
    point(v[worst], outside ? 0.5 : -0.5, xc);
    const double fc = g(xc);
    if (fc < std::min(fr, fv[worst])) {
      v[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    // Shrink towards the best vertex.
    for (std::size_t i = 0; i <= p; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < p; ++k) v[i][k] = v[best][k] + 0.5 * (v[i][k] - v[best][k]);
      fv[i] = g(v[i]);
    }
  }

  std::size_t b = 0;
  for (std::size_t i = 1; i <= p; ++i)
    if (fv[i] < fv[b] || (fv[i] == fv[b] && std::lexicographical_compare(
                                               v[i].begin(), v[i].end(), v[b].begin(), v[b].end())))
      b = i;
  Run r;
  r.x = v[b];
  r.value = -fv[b];
  r.converged = converged;
  r.evals = g.count - before;
  return r;
}

}  // namespace

std::vector<std::vector<double>> start_grid(const ParamBox& box, std::size_t per_axis) {
  if (per_axis == 0) throw std::invalid_argument("start_grid: need at least one start per axis");
  const std::size_t p = box.dim();
  std::size_t total = 1;
  for (std::size_t k = 0; k < p; ++k) total *= per_axis;
  std::vector<std::vector<double>> out(total, std::vector<double>(p));
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t rest = s;
    for (std::size_t k = p; k-- > 0;) {
      const std::size_t cell = rest % per_axis;
      rest /= per_axis;
      const double frac = (static_cast<double>(cell) + 0.5) / static_cast<double>(per_axis);
      out[s][k] = box.lo()[k] + frac * box.width(k);
    }
  }
  return out;
}

OptResult maximize_in_box(const Objective& f, const ParamBox& box, const OptConfig& cfg,
                          std::span<const std::size_t> start_order) {
  if (box.dim() == 0) throw std::invalid_argument("maximize_in_box: empty parameter box");
  if (!(cfg.f_tol > 0.0) || !(cfg.x_tol > 0.0) || cfg.max_iter == 0)
    throw std::invalid_argument("maximize_in_box: tolerances and max_iter must be positive");
  const auto grid = start_grid(box, cfg.starts_per_axis);
  std::vector<std::size_t> order(grid.size());
  if (start_order.empty()) {
    std::iota(order.begin(), order.end(), 0);
  } else {
    if (start_order.size() != grid.size())
      throw std::invalid_argument("maximize_in_box: start_order must permute the start grid");
    order.assign(start_order.begin(), start_order.end());
  }

  Evaluator g(f);
  constexpr double kStep = 0.1;
  Run best;
  bool any = false;
  for (std::size_t s : order) {
    Run r = nelder_mead(g, box, grid.at(s), kStep, cfg.coarse_iter, cfg.coarse_x_tol, 1e-8);
    if (!std::isfinite(r.value)) continue;
    if (!any || better(r.value, r.x, best.value, best.x)) best = std::move(r);
    any = true;
  }
  if (!any) throw NumericalError("optimizer: no start produced a finite objective value");

  Run polished = nelder_mead(g, box, best.x, kStep, cfg.max_iter, cfg.x_tol, cfg.f_tol);
  Run again = nelder_mead(g, box, polished.x, kStep, cfg.max_iter, cfg.x_tol, cfg.f_tol);
  Run& fin = better(again.value, again.x, polished.value, polished.x) ? again : polished;

  OptResult out;
  out.x = fin.x;
  out.value = fin.value;
  out.converged = again.converged;
  out.evaluations = g.count;
  out.at_bound.resize(box.dim());
  for (std::size_t k = 0; k < box.dim(); ++k) {
    const double tol = 1e-6 * box.width(k);
    out.at_bound[k] = (out.x[k] - box.lo()[k] <= tol) || (box.hi()[k] - out.x[k] <= tol);
    out.boundary_hit = out.boundary_hit || out.at_bound[k];
  }
  return out;
}

}  // namespace gqic
