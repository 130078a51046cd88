#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "actplace/errors.hpp"

namespace actplace::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_infeasible = 2,
  exit_invalid = 3,
  exit_certification = 4,
};

int exit_code_for(ErrorKind kind);

/// Worker-count variable read once per process.
inline constexpr const char* threads_env = "ACTPLACE_THREADS";

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace actplace::cli
