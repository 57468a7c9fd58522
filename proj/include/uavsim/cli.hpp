#pragma once

namespace uavsim {

/// Exit codes of the command-line front end.
enum ExitCode : int
{
    kExitOk = 0,
    kExitIo = 1,
    kExitValidation = 2,
};

/// Entry point of the `uavsim` tool (subcommands `run` and `sweep`).
int run_cli(int argc, const char* const* argv);

} // namespace uavsim
