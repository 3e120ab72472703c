#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace collab::service {

// Command-line entry point. args[0] is the program name. Exit codes: 0 success,
// 1 the command ran but reported failures (doctor problems, failed generation),
// 2 usage, configuration or input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace collab::service
