#ifndef GQIC_TOOLS_CLI_HPP_
#define GQIC_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace gqic::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;
inline constexpr int kNumericalError = 3;

// Runs one command line (without the program name). Results go to `out`
// unless an output file is requested; errors go to `err` as a JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gqic::cli

#endif  // GQIC_TOOLS_CLI_HPP_
