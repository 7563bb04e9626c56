#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cscale/config.hpp"

namespace cscale {

const std::vector<std::string>& command_names();

/// Keys accepted in a config file or through --set.
const std::set<std::string>& config_key_names();

struct RunConfig {
  std::string command;
  KeyValueConfig values;  // raw strings as supplied
  std::string format = "json";
  std::string out;        // empty: stdout
  bool timestamp = true;
};

struct RunResult {
  nlohmann::json report;
  nlohmann::json resolved;  // every value the command read, defaults included
  std::string csv;          // empty when the command has no table
  std::string verdict = "na";
};

RunResult execute(const RunConfig& cfg);

/// Full document written by the front end.
nlohmann::json report_document(const RunConfig& cfg, const RunResult& result);

/// Exit code: 0 pass/na, 2 fail, 1 usage or configuration error.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace cscale
