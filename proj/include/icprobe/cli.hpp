#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace icprobe::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kBackendFailure = 2,
  kInternalFailure = 3,
};

inline constexpr const char* kCacheDirEnv = "ICPROBE_CACHE_DIR";

// Runs `icprobe <subcommand> [flags]`; `args` excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace icprobe::cli
