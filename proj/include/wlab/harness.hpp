#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wlab/measure.hpp"

namespace wlab::harness {

struct FailureRecord {
  std::uint64_t seed = 0;  // replays the exact trial
  std::string message;     // carries the offending inputs
};

struct SuiteReport {
  std::string name;
  std::string claim;  // one-line statement of the property the suite checks
  int trials = 0;
  int passes = 0;
  std::vector<FailureRecord> failures;
  double max_deviation = 0.0;
  double wall_seconds = 0.0;

  bool passed() const { return failures.empty() && trials > 0; }

  // Canonical JSON with sorted keys. Wall time is emitted only on request so
  // that reports are byte-reproducible at fixed (seed, budget).
  nlohmann::json to_json(bool include_wall = false) const;
};

struct SuiteInfo {
  std::string name;
  std::string claim;
  int default_budget = 0;
  std::function<SuiteReport(std::uint64_t seed, int budget)> run;
};

const std::vector<std::string>& suite_names();
const std::map<std::string, SuiteInfo>& suite_registry();

// budget <= 0 selects the suite default. Deterministic in (name, seed, budget).
SuiteReport run_suite(const std::string& name, std::uint64_t seed, int budget = 0);

struct AggregateReport {
  std::vector<SuiteReport> suites;
  double wall_seconds = 0.0;

  bool all_passed() const;
  nlohmann::json to_json(bool include_wall = false) const;
};

AggregateReport run_all(std::uint64_t seed);

std::string human_table(const AggregateReport& report);
std::string human_line(const SuiteReport& report);

namespace testing {
// Distance evaluation hook for fault injection in tests: when set, the
// metric-axiom suite routes distances through it instead of the solver.
using DistanceFn =
    std::function<double(const DiscreteMeasure&, const DiscreteMeasure&, double)>;
extern DistanceFn distance_override;
}  // namespace testing

}  // namespace wlab::harness
