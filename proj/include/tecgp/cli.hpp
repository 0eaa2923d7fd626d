#pragma once

#include <iosfwd>

namespace tecgp {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,     // bad flags or configuration
    kExitData = 2,      // unreadable, malformed or insufficient data
    kExitInternal = 3,  // internal invariant violation
};

/// Entry point of the `tecgp` tool, callable in-process. Normal output goes
/// to `out`; failures print one line `error: <category>: <message>` to `err`
/// and return the matching exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tecgp
