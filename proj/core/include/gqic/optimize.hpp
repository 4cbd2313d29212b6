#ifndef GQIC_OPTIMIZE_HPP_
#define GQIC_OPTIMIZE_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gqic/model.hpp"

namespace gqic {

struct OptConfig {
  std::size_t starts_per_axis = 3;  // 3^p grid of starts at cell centres
  std::size_t max_iter = 2000;      // polishing iterations
  double f_tol = 1e-10;
  double x_tol = 1e-8;
  // Coarse pass run from every start before the best one is polished.
  std::size_t coarse_iter = 120;
  double coarse_x_tol = 1e-4;
};

struct OptResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  bool boundary_hit = false;
  std::vector<bool> at_bound;  // per coordinate, within 1e-6 of the box width
  std::size_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

// Maximizes f over the box with projected Nelder-Mead from a grid of starts.
// Starts are visited in the given order (identity when empty); among starts
// the highest value wins, ties going to the lexicographically smallest point.
// NumericalError thrown by f counts as -inf. Throws NumericalError when no
// start yields a finite value.
OptResult maximize_in_box(const Objective& f, const ParamBox& box, const OptConfig& cfg = {},
                          std::span<const std::size_t> start_order = {});

// The start grid used above, one point per row-major cell.
std::vector<std::vector<double>> start_grid(const ParamBox& box, std::size_t per_axis);

}  // namespace gqic

#endif  // GQIC_OPTIMIZE_HPP_
