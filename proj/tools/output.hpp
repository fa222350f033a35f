#pragma once

#include <string>

#include "commands.hpp"

namespace zenolab::cli {

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal text that reads back to the same double; "nan"/"inf"
/// for non-finite values.
std::string format_number(double x);

/// CSV: '#'-prefixed header lines (schema version, command, resolved config,
/// workers, metadata as JSON), one column-name row, then data rows. LF only.
std::string render_csv(const Table& table, const json& resolved, const RunContext& ctx);

/// The same content as one JSON document; non-finite numbers become null.
json render_json(const Table& table, const json& resolved, const RunContext& ctx);

}  // namespace zenolab::cli
