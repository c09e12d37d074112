#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bgt::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kCap = 3,
  kNumerical = 4,
};

/// Runs one subcommand. args excludes the program name. Main output goes to
/// --out (or `out` when absent); the run manifest to <out>.manifest.json
/// (or `err` when writing to the stream).
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv);

}  // namespace bgt::cli
