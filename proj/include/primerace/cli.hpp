#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace primerace {

// Runs one command; args exclude the program name. Returns the exit status:
// 0 success, 1 computation error or failed certificate, 2 validation error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace primerace
