// execute.hpp — runs a parsed configuration and maps failures to exit codes.

#pragma once

#include "lioueps/cli/config.hpp"
#include "lioueps/errors.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace lioueps::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kConfigError = 2,
  kDomainError = 3,
  kNumericalError = 4,
  kIoError = 5,
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct ExecOptions {
  std::string output_dir;              // empty: prefix is used as given
  int threads = 1;
  std::optional<std::uint64_t> seed;   // overrides trajectories.seed
};

inline constexpr const char* kVersion = "0.1.0";

int execute(const RunConfig& cfg, const ExecOptions& opts, std::ostream& out, std::ostream& err);

/// Full command line: `lioueps <config.json> [--output-dir D] [--threads N] [--seed S]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lioueps::cli
