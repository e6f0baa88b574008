#pragma once

#include <string>
#include <vector>

namespace interp {

/// Entry point shared by the binary and by manifest reruns. The vector form
/// takes the arguments without the program name. Returns the process exit
/// code; failures print a machine-readable error JSON to stderr.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace interp
