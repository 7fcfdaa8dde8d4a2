#ifndef VRJP_CLI_HPP
#define VRJP_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace vrjp::cli {

/// Exit statuses of the experiment runner.
enum ExitCode : int { kPass = 0, kCheckFailed = 1, kConfigError = 2 };

/// Runs one subcommand: simulate, density, exchangeability, freedman, characterize or canonicalize.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vrjp::cli

#endif  // VRJP_CLI_HPP
