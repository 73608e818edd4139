#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ctl/lab.hpp"

namespace ctl {

/// Malformed or schema-invalid configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string output = "ctl_report";  // writes <output>.csv and <output>.json
  std::vector<CheckSpec> checks;
};

/// Parses a config document. Unknown keys and unknown check ids are rejected.
/// Checks without their own seed inherit the global one.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

inline const std::vector<std::string>& report_csv_columns() {
  static const std::vector<std::string> cols{
      "check_id", "space", "K",    "N",   "p",     "beta",   "s",       "t",
      "tau1",     "tau2",  "lhs",  "rhs", "sigma", "margin", "verdict", "seed"};
  return cols;
}

void write_reports_csv(std::ostream& out, const std::vector<VerificationReport>& reports);
nlohmann::json reports_to_json(const std::vector<VerificationReport>& reports);
/// Parses and validates a report document; throws ConfigError when a field is
/// missing, mistyped, or a verdict disagrees with its own numbers.
std::vector<VerificationReport> reports_from_json(const nlohmann::json& doc);

/// 0 all pass, 1 any fail, 3 any inconclusive and no fail.
int exit_code_for(const std::vector<VerificationReport>& reports);

}  // namespace ctl
