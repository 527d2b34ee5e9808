#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "panolidar/config.hpp"

namespace panolidar::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParseError = 2,  // bad config, flags, or malformed input files
  kIoError = 3,
  kStrictBackendFailure = 4,
  kProtocolError = 5,
};

/// Entry point behind the `panolidar` binary. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = system_env);

}  // namespace panolidar::cli
