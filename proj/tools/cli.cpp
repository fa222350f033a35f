#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "acceptance.hpp"
#include "output.hpp"

namespace zenolab::cli {

namespace {

int parse_workers(const std::string& text, const std::string& origin) {
  int n = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), n);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || n < 1)
    throw ConfigError(origin + ": worker count must be a positive integer, got '" + text + "'");
  return n;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f << content;
  if (!f) throw ConfigError("failed writing output file '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    json resolved;
    Reader r(inv.config, "", resolved);
    RunContext ctx;
    const long seed = r.integer("seed", 0);
    if (seed < 0) fail("seed", "must be >= 0");
    ctx.seed = static_cast<std::uint64_t>(seed);

    std::optional<int> config_workers;
    if (r.has("workers")) {
      const long w = r.integer("workers");
      if (w < 1) fail("workers", "must be >= 1");
      config_workers = static_cast<int>(w);
    }
    if (inv.workers_flag) {
      if (*inv.workers_flag < 1) throw ConfigError("--workers must be >= 1");
      ctx.workers = *inv.workers_flag;
      ctx.workers_source = "flag";
    } else if (const char* env = std::getenv("ZENOLAB_WORKERS"); env && *env) {
      ctx.workers = parse_workers(env, "ZENOLAB_WORKERS");
      ctx.workers_source = "env ZENOLAB_WORKERS";
    } else if (config_workers) {
      ctx.workers = *config_workers;
      ctx.workers_source = "config";
    } else {
      ctx.workers = omp_get_max_threads();
      ctx.workers_source = "default";
    }

    std::optional<std::string> path = inv.out_path;
    std::string format;
    std::optional<std::string> fit_path;
    if (r.has("output")) {
      Reader o = r.object("output");
      if (o.has("path")) {
        const std::string p = o.text("path", "", {});
        if (!path) path = p;
      }
      if (o.has("format")) format = o.text("format", "csv", {"csv", "json"});
      if (o.has("fit_path")) fit_path = o.text("fit_path", "", {});
      o.finish();
    }
    if (format.empty()) format = path && ends_with(*path, ".json") ? "json" : "csv";

    omp_set_num_threads(ctx.workers);
    const Table table = run_command(inv.command, r, ctx);

    const std::string text =
        format == "json" ? render_json(table, resolved, ctx).dump(2) + "\n" : render_csv(table, resolved, ctx);
    if (path) {
      write_file(*path, text);
      if (inv.command == "regimes") write_file(fit_path.value_or(*path + ".fit.json"), table.metadata["fit"].dump(2) + "\n");
    } else {
      out << text;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kModuleError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kModuleError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"zenolab: survival, measurement and resonance-decay computations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  int workers = 0;
  std::string chosen;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " computation");
    sub->add_option("--config", config_path, "JSON scenario file")->required();
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--workers", workers, "worker count (overrides ZENOLAB_WORKERS and the config)")
        ->check(CLI::PositiveNumber);
    sub->callback([&chosen, name] { chosen = name; });
  }

  AcceptanceOptions acc;
  auto* acc_cmd = app.add_subcommand("acceptance", "run the acceptance suite");
  acc_cmd->add_option("--only", acc.only, "criterion ids to run")->check(CLI::Range(1, kCriterionCount));
  acc_cmd->add_option("--tolerance-scale", acc.tolerance_scale, "multiply every tolerance (self-test hook)")
      ->check(CLI::PositiveNumber);
  acc_cmd->add_option("--golden-dir", acc.golden_dir, "directory holding survival_golden.{json,csv}");
  acc_cmd->callback([&chosen] { chosen = "acceptance"; });

  std::vector<std::string> storage{"zenolab"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  if (chosen == "acceptance") {
    out << format_result({0, "criterion", false, "measured", "tolerance", -1.0, "detail"}) << "\n";
    const auto results = run_acceptance(acc, [&out](const CriterionResult& r) { out << format_result(r) << std::endl; });
    int failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    out << (failed ? "FAILED: " + std::to_string(failed) + " of " : "PASSED: all ") << results.size()
        << " criteria\n";
    return failed ? kAcceptanceFail : kOk;
  }

  Invocation inv;
  inv.command = chosen;
  try {
    inv.config = json::parse(read_file(config_path));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const json::parse_error& e) {
    err << "config error: " << config_path << " is not valid JSON: " << e.what() << "\n";
    return kConfigError;
  }
  if (workers > 0) inv.workers_flag = workers;
  if (!out_path.empty()) inv.out_path = out_path;
  return execute(inv, out, err);
}

}  // namespace zenolab::cli
