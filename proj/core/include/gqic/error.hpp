#ifndef GQIC_ERROR_HPP_
#define GQIC_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace gqic {

// Precondition violations are reported with std::invalid_argument. The two
// classes below separate bad input data from numerical breakdown so that
// callers (the CLI in particular) can map them to distinct exit codes.

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what,
                     std::optional<std::size_t> line = std::nullopt,
                     std::optional<std::size_t> column = std::nullopt)
      : std::runtime_error(what), line_(line), column_(column) {}

  std::optional<std::size_t> line() const { return line_; }
  std::optional<std::size_t> column() const { return column_; }

 private:
  std::optional<std::size_t> line_;
  std::optional<std::size_t> column_;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// S_{j-1}(gamma) fell below the non-degeneracy guard at increment j (1-based).
class DegenerateScaleError : public NumericalError {
 public:
  DegenerateScaleError(std::size_t j, double s)
      : NumericalError("degenerate scale: S_{j-1} = " + std::to_string(s) +
                       " below guard at increment j = " + std::to_string(j)),
        index_(j) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace gqic

#endif  // GQIC_ERROR_HPP_
