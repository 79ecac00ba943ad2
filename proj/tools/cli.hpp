// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace emovec::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,    // bad flags, bad input files, validation failures
  kExitBackend = 2,  // backend or transport failure
};

/// Runs `emovec <args...>` (args exclude the program name).
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace emovec::cli
