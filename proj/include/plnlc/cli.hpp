#ifndef PLNLC_CLI_HPP
#define PLNLC_CLI_HPP

namespace plnlc {

/// Entry point behind the plnlc binary. Subcommands: synth | impute | fit |
/// forecast | diagnose, each driven by a flat key=value config file.
/// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.
int run_cli(int argc, const char *const *argv);

} // namespace plnlc

#endif // PLNLC_CLI_HPP
