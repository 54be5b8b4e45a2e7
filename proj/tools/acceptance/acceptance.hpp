#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace hodgekit::acceptance {

using Json = nlohmann::ordered_json;

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;  // one human-readable line
  std::vector<Check> checks;
  std::string error;    // set when the criterion aborted with an exception
};

struct SuiteConfig {
  std::uint64_t seed = 7;
  bool check_determinism = true;  // re-run everything and compare the JSON
};

struct SuiteResult {
  SuiteConfig config;
  std::vector<CriterionResult> criteria;
  bool pass = false;
};

SuiteResult run_suite(const SuiteConfig& config);

Json to_json(const CriterionResult& result);
Json to_json(const SuiteResult& result);

/// "PASS criterion 3 (harmonic-dimensions): ..." style line.
std::string summary_line(const CriterionResult& result);

}  // namespace hodgekit::acceptance
