#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace zenolab::cli {

/// Rows of plot-ready numbers plus everything needed to describe them.
struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  json metadata = json::object();  // scalar results and notes, echoed in the header
};

struct RunContext {
  int workers = 1;
  std::string workers_source = "default";
  std::uint64_t seed = 0;
};

const std::vector<std::string>& command_names();

/// Reads and validates the command's parameters from `r`, rejects unknown
/// keys, then runs it. Invalid input throws ConfigError; failures during the
/// computation propagate as zenolab::Error.
Table run_command(const std::string& name, Reader& r, const RunContext& ctx);

}  // namespace zenolab::cli
