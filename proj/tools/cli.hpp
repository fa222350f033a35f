#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "commands.hpp"

namespace zenolab::cli {

enum ExitCode : int { kOk = 0, kAcceptanceFail = 1, kConfigError = 2, kModuleError = 3 };

/// One command run with an already-parsed configuration.
struct Invocation {
  std::string command;
  json config = json::object();
  std::optional<int> workers_flag;
  std::optional<std::string> out_path;
};

/// Runs the invocation. Output goes to `out_path` (or the config's
/// output.path) when set and to `out` otherwise; diagnostics go to `err`.
int execute(const Invocation& inv, std::ostream& out, std::ostream& err);

/// Full command-line entry point; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zenolab::cli
