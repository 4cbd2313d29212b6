#include "gqic/sde.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "gqic/error.hpp"

namespace gqic {

void SamplePath::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("SamplePath: h must be positive");
  if (values.size() < 2) throw std::invalid_argument("SamplePath: need at least two observations");
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j]))
      throw std::invalid_argument("SamplePath: non-finite value at index " + std::to_string(j));
  }
}

TrueModel reference_true_model() {
  TrueModel m;
  m.drift = [](double x) { return -0.5 * x; };
  m.scale = [](double x) { return 3.0 / (1.0 + x * x); };
  m.x0 = 0.0;
  return m;
}

SamplePath euler_path(const TrueModel& model, const LevySpec& spec, std::size_t n, double h,
                      RngStream& rng, const EulerOptions& opt) {
  if (n == 0) throw std::invalid_argument("euler_path: n must be at least 1");
  if (opt.refine == 0) throw std::invalid_argument("euler_path: refine must be at least 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("euler_path: h must be positive");
  validate(spec);

  const double dt = h / static_cast<double>(opt.refine);
  SamplePath path;
  path.h = h;
  path.values.resize(n + 1);
  double x = model.x0;
  path.values[0] = x;
  std::size_t step = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t k = 0; k < opt.refine; ++k, ++step) {
      const double dz = draw_increment(spec, dt, rng);
      x += model.drift(x) * dt + model.scale(x) * dz;
      if (!std::isfinite(x) || std::abs(x) > opt.overflow_guard) {
        std::ostringstream os;
        os << "euler_path: trajectory exploded at fine step " << step + 1 << " (observation " << j
           << "), |X| exceeded " << opt.overflow_guard;
        throw NumericalError(os.str());
      }
    }
    path.values[j] = x;
  }
  return path;
}

void write_path_csv(std::ostream& os, const SamplePath& path,
                    const std::vector<std::string>& comments) {
  for (const auto& c : comments) {
    std::istringstream lines(c);
    std::string line;
    while (std::getline(lines, line)) os << "# " << line << '\n';
  }
  os << "time,value\n";
  const auto old = os.precision(17);
  for (std::size_t j = 0; j < path.values.size(); ++j) {
    os << static_cast<double>(j) * path.h << ',' << path.values[j] << '\n';
  }
  os.precision(old);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, std::size_t line, std::size_t column) {
  const auto t = trim(field);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw DataError("invalid number '" + std::string(t) + "'", line, column);
  }
  return v;
}

}  // namespace

SamplePath read_path_csv(std::istream& is, std::optional<double> declared_h) {
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::size_t> rows;
  while (std::getline(is, raw)) {
    ++line;
    const auto s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    if (!header_seen) {
      if (s != "time,value") {
        throw DataError("expected header 'time,value', found '" + std::string(s) + "'", line, 1);
      }
      header_seen = true;
      continue;
    }
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) throw DataError("expected two columns", line, s.size() + 1);
    if (s.find(',', comma + 1) != std::string_view::npos)
      throw DataError("too many columns", line, s.find(',', comma + 1) + 1);
    rows.push_back(line);
    times.push_back(parse_field(s.substr(0, comma), line, 1));
    values.push_back(parse_field(s.substr(comma + 1), line, comma + 2));
  }
  if (!header_seen) throw DataError("missing header 'time,value'", line + 1, 1);
  if (values.size() < 2) throw DataError("need at least two observations", line + 1, 1);

  SamplePath path;
  path.values = std::move(values);
  if (declared_h) {
    if (!(*declared_h > 0.0)) throw std::invalid_argument("declared h must be positive");
    path.h = *declared_h;
  } else {
    const double n = static_cast<double>(times.size() - 1);
    path.h = (times.back() - times.front()) / n;
    if (!(path.h > 0.0)) throw DataError("time column must be increasing", rows.back(), 1);
    for (std::size_t j = 1; j < times.size(); ++j) {
      const double step = times[j] - times[j - 1];
      if (std::abs(step - path.h) > 1e-6 * path.h) {
        throw DataError("time column is not equispaced; pass the step explicitly", rows[j], 1);
      }
    }
  }
  return path;
}

}  // namespace gqic
