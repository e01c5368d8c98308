#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace agone::detail {

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;  // executable missing or exec failed
  std::string out;
  std::string err;
  std::int64_t duration_ms = 0;

  bool ok() const { return !spawn_failed && !timed_out && exit_code == 0; }
};

struct CommandOptions {
  std::optional<std::filesystem::path> cwd;
  std::chrono::milliseconds timeout{std::chrono::milliseconds::zero()};  // zero = unbounded
};

// Runs `argv` (argv[0] is the executable, resolved via PATH when relative)
// capturing stdout/stderr. On timeout the process group is killed and
// timed_out is set.
CommandResult run_command(const std::vector<std::string>& argv,
                          const CommandOptions& options = {});

// True when `name` resolves to an executable via PATH (or directly when it
// contains a slash).
bool executable_exists(const std::string& name);

}  // namespace agone::detail
