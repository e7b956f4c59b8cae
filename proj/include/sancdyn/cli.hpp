#pragma once

#include <string>
#include <vector>

namespace sancdyn {

/// Dispatches the simulate / montecarlo / sweep / analyze subcommands.
/// Returns the process exit status: 0 success, 1 usage or constraint
/// error (nothing written), 2 runtime or estimation error.
int run_cli(const std::vector<std::string>& args);

}  // namespace sancdyn
