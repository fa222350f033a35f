#include "output.hpp"

#include <charconv>
#include <cmath>

namespace zenolab::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

json workers_json(const RunContext& ctx) { return {{"count", ctx.workers}, {"source", ctx.workers_source}}; }

}  // namespace

std::string render_csv(const Table& table, const json& resolved, const RunContext& ctx) {
  std::string s;
  s += "# schema_version: " + std::to_string(kSchemaVersion) + "\n";
  s += "# command: " + table.command + "\n";
  s += "# config: " + resolved.dump() + "\n";
  s += "# workers: " + workers_json(ctx).dump() + "\n";
  s += "# metadata: " + table.metadata.dump() + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) s += (i ? "," : "") + table.columns[i];
  s += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += format_number(row[i]);
    }
    s += '\n';
  }
  return s;
}

json render_json(const Table& table, const json& resolved, const RunContext& ctx) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = json::array();
    for (double x : row) r.push_back(std::isfinite(x) ? json(x) : json(nullptr));
    rows.push_back(std::move(r));
  }
  return {{"schema_version", kSchemaVersion}, {"command", table.command}, {"config", resolved},
          {"workers", workers_json(ctx)},     {"metadata", table.metadata}, {"columns", table.columns},
          {"rows", rows}};
}

}  // namespace zenolab::cli
