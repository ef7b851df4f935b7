#ifndef PURSUIT_CLI_APP_HPP
#define PURSUIT_CLI_APP_HPP

namespace pursuit {

/// Full command-line front end (run / compare / sweep / gen subcommands).
/// Returns the process exit code: 0 success, 1 usage or file error,
/// 2 experiment failure.
int run_cli(int argc, const char* const* argv);

}  // namespace pursuit

#endif  // PURSUIT_CLI_APP_HPP
