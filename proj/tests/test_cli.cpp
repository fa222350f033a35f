#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "output.hpp"
#include "zenolab/resolvent.hpp"

using namespace zenolab;
using namespace zenolab::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result exec(const std::string& command, const json& config, std::optional<int> workers = 1) {
  std::ostringstream out, err;
  const int code = execute({command, config, workers, std::nullopt}, out, err);
  return {code, out.str(), err.str()};
}

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  double at(std::size_t row, const std::string& col) const {
    const auto it = std::find(columns.begin(), columns.end(), col);
    REQUIRE(it != columns.end());
    return rows.at(row).at(static_cast<std::size_t>(it - columns.begin()));
  }
};

Csv parse_csv(const std::string& text) {
  Csv c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      c.header.push_back(line);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (c.columns.empty()) {
      c.columns = cells;
      continue;
    }
    std::vector<double> row;
    for (const auto& s : cells) row.push_back(std::strtod(s.c_str(), nullptr));
    c.rows.push_back(row);
  }
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

const json kFlat = {{"kind", "flat_interval"}, {"g0_sq", 0.01}, {"omega_g", 0.0}, {"omega_max", 1.0}};

}  // namespace

TEST_CASE("survival of the Rabi system follows cos^2") {
  const double omega = 0.7;
  const auto r = exec("survival", {{"hamiltonian", {{0, omega}, {omega, 0}}},
                                   {"times", {{"start", 0.0}, {"stop", 6.0}, {"count", 61}}}});
  REQUIRE(r.code == kOk);
  const Csv c = parse_csv(r.out);
  CHECK(c.columns == std::vector<std::string>{"t", "re_A", "im_A", "p"});
  REQUIRE(c.rows.size() == 61);
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    const double t = c.at(i, "t");
    CHECK(std::abs(c.at(i, "p") - std::pow(std::cos(omega * t), 2)) <= 1e-10);
  }
}

TEST_CASE("single-point grid at t = 0") {
  const auto r = exec("survival", {{"hamiltonian", {{"rabi", {{"omega", 1.0}}}}}, {"times", {0.0}}});
  REQUIRE(r.code == kOk);
  const Csv c = parse_csv(r.out);
  REQUIRE(c.rows.size() == 1);
  CHECK(c.at(0, "p") == 1.0);
}

TEST_CASE("header carries schema version and the resolved config") {
  const auto r = exec("survival", {{"hamiltonian", {{0, 1}, {1, 0}}}});
  REQUIRE(r.code == kOk);
  const Csv c = parse_csv(r.out);
  REQUIRE(c.header.size() >= 4);
  CHECK(c.header[0] == "# schema_version: 1");
  CHECK(c.header[1] == "# command: survival");
  const json cfg = json::parse(c.header[2].substr(std::string("# config: ").size()));
  // Defaults are echoed, not hidden.
  CHECK(cfg.at("seed") == 0);
  CHECK(cfg.at("state") == json{{"basis", 0}});
  CHECK(cfg.at("times") == json::array({0.0}));
  CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("configuration errors exit with 2 and name the field") {
  SUBCASE("unknown key") {
    const auto r = exec("survival", {{"hamiltonian", {{0, 1}, {1, 0}}}, {"tmes", {0.0}}});
    CHECK(r.code == kConfigError);
    CHECK(r.err.find("tmes") != std::string::npos);
  }
  SUBCASE("ragged matrix") {
    const auto r = exec("survival", {{"hamiltonian", {{0, 1}, {1}}}});
    CHECK(r.code == kConfigError);
    CHECK(r.err.find("hamiltonian[1]") != std::string::npos);
  }
  SUBCASE("non-numeric entry") {
    const auto r = exec("survival", {{"hamiltonian", {{0, "x"}, {1, 0}}}});
    CHECK(r.code == kConfigError);
    CHECK(r.err.find("hamiltonian[0][1]") != std::string::npos);
  }
  SUBCASE("unknown key inside a nested block") {
    const auto r = exec("pole", {{"form_factor", {{"kind", "flat_interval"}, {"g0", 0.1}}}, {"omega0", 0.5}});
    CHECK(r.code == kConfigError);
  }
  SUBCASE("state dimension mismatch") {
    const auto r = exec("survival", {{"hamiltonian", {{0, 1}, {1, 0}}}, {"state", {1, 0, 0}}});
    CHECK(r.code == kConfigError);
    CHECK(r.err.find("state") != std::string::npos);
  }
  SUBCASE("decreasing time grid") {
    const auto r = exec("survival", {{"hamiltonian", {{0, 1}, {1, 0}}}, {"times", {1.0, 0.5}}});
    CHECK(r.code == kConfigError);
  }
  SUBCASE("module precondition during validation") {
    const auto r = exec("continuous", {{"omega", 1.0}, {"v", 2.0}, {"gamma", 8.0}, {"times", {0.0}}});
    CHECK(r.code == kConfigError);
    const auto r2 = exec("pole", {{"form_factor", {{"kind", "flat_interval"}, {"omega_g", 1.0}, {"omega_max", 0.0}}},
                                  {"omega0", 0.5}});
    CHECK(r2.code == kConfigError);
  }
  SUBCASE("field resolution guard") {
    const auto r = exec("fieldsim", {{"W", 200.0}, {"dt", 1e-2}});
    CHECK(r.code == kConfigError);
    CHECK(r.err.find("dt") != std::string::npos);
  }
  SUBCASE("empty sweep") {
    const auto r = exec("sweep", {{"base", "continuous"}, {"parameter", "v"}, {"values", json::array()},
                                  {"config", {{"omega", 1.0}, {"v", 1.0}, {"times", {0.0}}}}});
    CHECK(r.code == kConfigError);
    CHECK(r.err.find("empty") != std::string::npos);
  }
  SUBCASE("bad sweep value is caught before running") {
    const auto r = exec("sweep", {{"base", "continuous"}, {"parameter", "v"}, {"values", {1.0, -2.0}},
                                  {"config", {{"omega", 1.0}, {"v", 1.0}, {"times", {0.0}}}}});
    CHECK(r.code == kConfigError);
  }
}

TEST_CASE("numerical failures exit with 3") {
  const auto r = exec("pole", {{"form_factor", {{"kind", "flat_interval"}, {"g0_sq", 0.0}}}, {"omega0", 0.5}});
  CHECK(r.code == kModuleError);
  CHECK(!r.err.empty());
}

TEST_CASE("command-line parsing") {
  CHECK(invoke({}).code == kConfigError);
  CHECK(invoke({"survival"}).code == kConfigError);
  CHECK(invoke({"survival", "--config", "/nonexistent/config.json"}).code == kConfigError);
  CHECK(invoke({"--help"}).code == kOk);

  const auto dir = std::filesystem::temp_directory_path() / "zenolab_test_cli";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "broken.json") << "{ not json";
  }
  CHECK(invoke({"survival", "--config", (dir / "broken.json").string()}).code == kConfigError);
}

TEST_CASE("golden survival CSV is byte-identical") {
  const std::filesystem::path data(ZENOLAB_TEST_DATA);
  const auto out = std::filesystem::temp_directory_path() / "zenolab_golden_check.csv";
  const auto r = invoke({"survival", "--config", (data / "survival_golden.json").string(), "--workers", "1", "--out",
                      out.string()});
  REQUIRE(r.code == kOk);
  CHECK(slurp(out) == slurp(data / "survival_golden.csv"));
  const auto again = invoke({"survival", "--config", (data / "survival_golden.json").string(), "--workers", "1"});
  CHECK(again.out == slurp(data / "survival_golden.csv"));
}

TEST_CASE("continuous sweep reproduces the measurement-strength ordering") {
  const json cfg = {{"base", "continuous"},
                    {"parameter", "v"},
                    {"values", {0.4, 2.0, 10.0}},
                    {"config", {{"omega", 1.0}, {"v", 1.0}, {"times", {0.0, 1.0, 3.0}}}}};
  const auto r = exec("sweep", cfg, 3);
  REQUIRE(r.code == kOk);
  const Csv c = parse_csv(r.out);
  REQUIRE(c.rows.size() == 9);
  std::vector<double> p_at_3;
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    CHECK(c.at(i, "index") == static_cast<double>(i / 3));
    if (c.at(i, "t") == 3.0) p_at_3.push_back(c.at(i, "p"));
  }
  REQUIRE(p_at_3.size() == 3);
  CHECK(p_at_3[0] < p_at_3[1]);
  CHECK(p_at_3[1] < p_at_3[2]);

  // Ordered aggregation: the data rows do not depend on the worker count.
  const auto serial = exec("sweep", cfg, 1);
  CHECK(parse_csv(serial.out).rows == c.rows);
}

TEST_CASE("sweep over a nested parameter and a range") {
  const json cfg = {{"base", "pole"},
                    {"parameter", "form_factor.g0_sq"},
                    {"range", {{"start", 0.001}, {"stop", 0.004}, {"count", 4}}},
                    {"config", {{"form_factor", kFlat}, {"omega0", 0.5}}}};
  const auto r = exec("sweep", cfg, 2);
  REQUIRE(r.code == kOk);
  const Csv c = parse_csv(r.out);
  REQUIRE(c.rows.size() == 4);
  for (std::size_t i = 1; i < 4; ++i) CHECK(c.at(i, "gamma") > c.at(i - 1, "gamma"));
}

TEST_CASE("pole JSON on the flat reference model") {
  const auto r = exec("pole", {{"form_factor", kFlat}, {"omega0", 0.5}, {"output", {{"format", "json"}}}});
  REQUIRE(r.code == kOk);
  const json doc = json::parse(r.out);
  const double gamma = doc.at("metadata").at("pole").at("gamma").get<double>();
  const PoleSolution p = find_pole(FormFactor::flat_interval(0.01, 0.0, 1.0), 0.5);
  CHECK(gamma == p.gamma);
  // 2 pi g0^2 = 0.0628319 is the golden-rule value; the pole sits an O(g0^4) gap above it.
  CHECK(std::abs(doc.at("metadata").at("golden_rule").at("gamma").get<double>() - 0.0628319) <= 1e-7);
  CHECK(std::abs(gamma - 0.0628319) / 0.0628319 <= 0.05);
  for (const char* key : {"e_pole", "omega0", "delta_omega0", "gamma", "z", "sigma_derivative", "residual",
                          "iterations", "method", "form_factor"})
    CHECK(doc.at("metadata").at("pole").contains(key));
}

TEST_CASE("JSON output round-trips and its config reruns identically") {
  const json cfg = {{"form_factor", kFlat},
                    {"omega0", 0.5},
                    {"times", {{"start", 0.0}, {"stop", 20.0}, {"step", 0.5}}},
                    {"output", {{"format", "json"}}}};
  const auto r = exec("invert", cfg);
  REQUIRE(r.code == kOk);
  const json doc = json::parse(r.out);
  CHECK(doc.at("schema_version") == kSchemaVersion);
  CHECK(doc.at("columns").size() == 8);
  CHECK(doc.at("rows").size() == 41);
  CHECK(json::parse(doc.dump()) == doc);
  const auto again = exec("invert", doc.at("config"));
  REQUIRE(again.code == kOk);
  CHECK(again.out == r.out);
  CHECK(std::abs(doc.at("rows")[0][3].get<double>() - 1.0) <= 1e-6);
}

TEST_CASE("every command produces its columns") {
  const json times = {{"start", 0.0}, {"stop", 1.0}, {"count", 5}};
  struct Case {
    const char* command;
    json config;
    std::vector<std::string> columns;
  };
  const std::vector<Case> cases{
      {"pulsed", {{"t", 1.0}, {"pulses", {1, 4, 16}}}, {"N", "tau", "p", "gamma_eff", "gamma_ref"}},
      {"pulsed", {{"tau", 0.25}, {"times", times}}, {"t", "p_free", "p_pulsed"}},
      {"continuous", {{"gamma", 8.0}, {"times", times}}, {"t", "re_A", "im_A", "p"}},
      {"fieldsim", {{"W", 20.0}, {"n", 256}, {"dt", 2e-3}, {"T", 0.2}, {"stride", 10}},
       {"t", "re_x", "im_x", "re_y", "im_y", "norm2"}},
      {"selfenergy", {{"form_factor", kFlat}, {"points", {{0.5, 0.1}, {-1.0, 0.0}}}},
       {"re_E", "im_E", "re_sigma", "im_sigma"}},
      {"selfenergy", {{"form_factor", kFlat}, {"mode", "boundary"}, {"x", {0.25, 0.5}}},
       {"x", "re_sigma_plus", "im_sigma_plus", "re_sigma_minus", "im_sigma_minus"}},
      {"invert", {{"form_factor", kFlat}, {"omega0", 0.5}, {"times", times}, {"decompose", false}},
       {"t", "re_A", "im_A", "p", "re_pole", "im_pole", "re_cut", "im_cut"}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.command);
    const auto r = exec(c.command, c.config);
    REQUIRE(r.code == kOk);
    const Csv csv = parse_csv(r.out);
    CHECK(csv.columns == c.columns);
    CHECK(!csv.rows.empty());
  }
}

TEST_CASE("regimes writes the fit next to the series") {
  const auto dir = std::filesystem::temp_directory_path() / "zenolab_test_cli";
  std::filesystem::create_directories(dir);
  const json cfg = {{"form_factor", kFlat},
                    {"omega0", 0.5},
                    {"times",
                     {{"segments",
                       {{{"start", 0.0}, {"stop", 1.0}, {"step", 0.005}},
                        {{"start", 1.0}, {"stop", 1000.0}, {"step", 0.5}},
                        {{"start", 1000.0}, {"stop", 4000.0}, {"step", 1.0}}}}}}};
  const auto out = dir / "regimes.csv";
  std::ostringstream o, e;
  REQUIRE(execute({"regimes", cfg, 1, out.string()}, o, e) == kOk);
  const json fit = json::parse(slurp(dir / "regimes.csv.fit.json"));
  const PoleSolution p = find_pole(FormFactor::flat_interval(0.01, 0.0, 1.0), 0.5);
  CHECK(std::abs(fit.at("exp_rate").get<double>() - p.gamma) / p.gamma <= 0.02);
  CHECK(std::abs(fit.at("power_exponent").get<double>() + 2.0) <= 0.15);
  CHECK(fit.at("exp_window").contains("rms_residual"));
}

TEST_CASE("worker count precedence and echo") {
  const json cfg = {{"hamiltonian", {{0, 1}, {1, 0}}}, {"workers", 3}};
  auto workers_line = [](const std::string& out) { return parse_csv(out).header.at(3); };
  ::unsetenv("ZENOLAB_WORKERS");
  CHECK(workers_line(exec("survival", cfg, std::nullopt).out) == R"(# workers: {"count":3,"source":"config"})");
  ::setenv("ZENOLAB_WORKERS", "2", 1);
  CHECK(workers_line(exec("survival", cfg, std::nullopt).out) ==
        R"(# workers: {"count":2,"source":"env ZENOLAB_WORKERS"})");
  CHECK(workers_line(exec("survival", cfg, 5).out) == R"(# workers: {"count":5,"source":"flag"})");
  ::setenv("ZENOLAB_WORKERS", "zero", 1);
  CHECK(exec("survival", cfg, std::nullopt).code == kConfigError);
  ::unsetenv("ZENOLAB_WORKERS");
}

TEST_CASE("acceptance harness reports failure under a tampered tolerance") {
  const auto ok = invoke({"acceptance", "--only", "1", "4"});
  CHECK(ok.code == kOk);
  CHECK(ok.out.find("PASS") != std::string::npos);
  const auto tampered = invoke({"acceptance", "--only", "1", "--tolerance-scale", "1e-12"});
  CHECK(tampered.code == kAcceptanceFail);
  CHECK(tampered.out.find("FAIL") != std::string::npos);
}

TEST_CASE("number formatting is shortest round-trip") {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(std::nan("")) == "nan");
}
