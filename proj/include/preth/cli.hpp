#pragma once

#include <string>
#include <vector>

namespace preth {

/// Entry point of the command-line tool. Exposed so tests can drive the
/// CLI in-process: exit status 0 on success, 2 when a certification is
/// refused, 1 on any other error.
int cli_main(int argc, char** argv);

/// Convenience overload for tests: `args` excludes the program name.
int cli_main(const std::vector<std::string>& args);

}  // namespace preth
