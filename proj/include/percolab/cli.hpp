#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace percolab::cli {

struct RunOptions {
  std::string config_path;
  std::string out_dir = "out";
  int workers = 0;  ///< 0 = all available; must not affect any payload
  std::optional<std::uint64_t> seed_override;
};

/// Exit codes: 0 success, 1 inequality/verification failure, 2 config
/// error, 3 I/O error.
enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kConfigError = 2,
  kIoError = 3,
};

/// Dispatches a subcommand (simulate, oracle-check, certify, fit) and maps
/// exceptions to the exit-code contract.
int run_command(const std::string& command, const RunOptions& opts);

const char* version_string();

}  // namespace percolab::cli
