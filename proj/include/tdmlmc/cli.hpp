#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tdmlmc {

// Exit codes: 0 success, 1 unexpected failure, 2 configuration error,
// 3 numerical failure.
int run_cli(int argc, const char* const* argv);
// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tdmlmc
