#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace percolab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitViolated = 2;

std::string tool_version();

struct CommandOptions {
  std::string command;  // simulate | estimate | profile | verify | report
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

// Runs one command and returns its exit code. Progress goes to `log`,
// errors to `err`. Outputs of a failed run are removed.
int run_command(const CommandOptions& options, std::ostream& log, std::ostream& err);

}  // namespace percolab
