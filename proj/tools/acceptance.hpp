#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace zenolab::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  std::string tolerance;
  double seconds = 0.0;
  std::string detail;
};

struct AcceptanceOptions {
  std::vector<int> only;         // empty: run every criterion
  double tolerance_scale = 1.0;  // multiplies every tolerance; < 1 tightens
  std::string golden_dir;        // holds survival_golden.{json,csv} when set
};

inline constexpr int kCriterionCount = 10;

/// Runs the selected criteria; each finished result is passed to `report`
/// as soon as it is known.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& report = {});

/// One fixed-width line per criterion.
std::string format_result(const CriterionResult& r);

}  // namespace zenolab::cli
