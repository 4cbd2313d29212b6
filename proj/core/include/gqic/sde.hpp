#ifndef GQIC_SDE_HPP_
#define GQIC_SDE_HPP_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gqic/levy.hpp"
#include "gqic/rng.hpp"

namespace gqic {

// Observations X_{t_0}, ..., X_{t_n} on the grid t_j = j h.
struct SamplePath {
  double h = 0.0;
  std::vector<double> values;

  std::size_t n() const { return values.empty() ? 0 : values.size() - 1; }
  double horizon() const { return static_cast<double>(n()) * h; }
  double increment(std::size_t j) const { return values[j] - values[j - 1]; }  // j >= 1

  // Throws std::invalid_argument unless h > 0, at least two points, all finite.
  void validate() const;
};

struct TrueModel {
  std::function<double(double)> drift;  // A(x)
  std::function<double(double)> scale;  // C(x)
  double x0 = 0.0;
};

// dX = -X/2 dt + 3/(1+X^2) dZ, X_0 = 0.
TrueModel reference_true_model();

struct EulerOptions {
  std::size_t refine = 10;
  double overflow_guard = 1e12;
};

// Euler scheme on the fine grid h/refine, recording every refine-th point.
SamplePath euler_path(const TrueModel& model, const LevySpec& spec, std::size_t n, double h,
                      RngStream& rng, const EulerOptions& opt = {});

// Two-column CSV "time,value" preceded by optional '#' comment lines. Values
// use 17 significant digits.
void write_path_csv(std::ostream& os, const SamplePath& path,
                    const std::vector<std::string>& comments = {});

// Reads the CSV written above. Without a declared h the step is inferred from
// the time column, which must then be equispaced. Malformed input throws
// DataError carrying the 1-based line and column.
SamplePath read_path_csv(std::istream& is, std::optional<double> declared_h = std::nullopt);

}  // namespace gqic

#endif  // GQIC_SDE_HPP_
