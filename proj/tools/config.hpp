#pragma once

// JSON scenario reading for the command-line front end. A Reader walks one
// JSON object, hands out typed values by key, writes every value it handed
// out (defaults included) into a resolved-configuration tree so it can be
// echoed, and rejects keys nobody asked for.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "zenolab/qdyn.hpp"
#include "zenolab/resolvent.hpp"

namespace zenolab::cli {

using json = nlohmann::json;

/// Malformed or out-of-range configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Reader {
 public:
  /// `out` receives the resolved values; it must outlive the reader.
  Reader(const json& node, std::string path, json& out);

  const std::string& path() const noexcept { return path_; }
  bool has(const std::string& key) const;

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  double positive(const std::string& key);
  double positive(const std::string& key, double fallback);
  double non_negative(const std::string& key, double fallback);
  long integer(const std::string& key);
  long integer(const std::string& key, long fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback,
                   const std::vector<std::string>& allowed);
  std::vector<double> numbers(const std::string& key);
  std::vector<long> integers(const std::string& key);

  /// Nested object; its resolved values land under `key`. Call finish() on it.
  Reader object(const std::string& key);
  /// Raw value for polymorphic fields; the caller records what it used.
  const json& raw(const std::string& key) const;
  void record(const std::string& key, json value);

  /// Throws if any key was never read. Call after all reads.
  void finish();

  std::string field(const std::string& key) const;

 private:
  const json& node_;
  std::string path_;
  json& out_;
  std::set<std::string> seen_;
};

[[noreturn]] void fail(const std::string& field, const std::string& what);

/// Time grid: an explicit increasing list, {"start","stop","count"},
/// {"start","stop","step"} or {"segments": [...]} concatenating the above.
std::vector<double> read_grid(Reader& r, const std::string& key);
std::vector<double> read_grid(Reader& r, const std::string& key, const std::vector<double>& fallback);

/// Complex scalar: a number or a [re, im] pair.
complex read_complex(const json& v, const std::string& field);

/// Inline matrix (rows of complex scalars), {"rabi": {"omega": w}} or
/// {"random_hermitian": {"dim": n}} (seeded by the top-level seed).
OperatorMatrix read_hamiltonian(Reader& r, const std::string& key, std::uint64_t seed);

/// Inline vector, {"basis": k} or "random" (seeded by seed + 1).
StateVector read_state(Reader& r, const std::string& key, Eigen::Index dim, std::uint64_t seed);

FormFactor read_form_factor(Reader& r, const std::string& key);
json form_factor_json(const FormFactor& ff);

}  // namespace zenolab::cli
