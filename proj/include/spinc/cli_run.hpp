#pragma once

// Batch driver shared by the command-line tool and the acceptance runner.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace spinc {

struct RunRequest {
  std::string subcommand;  // verify-algebra | verify-symbols | model-invert | relindex | toeplitz | topo
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string format = "json";  // json | text
  bool timing = false;
};

struct CheckRecord {
  std::string name;
  std::string anchor;  // the identity or formula being checked
  std::string status;  // pass | fail | rejected
  double max_error = 0.0;
  nlohmann::json details = nlohmann::json::object();
};

enum ExitCode : int { kExitPass = 0, kExitUsage = 1, kExitAdmissibility = 2, kExitCheckFailure = 3 };

struct Report {
  RunRequest request;
  std::vector<CheckRecord> checks;  // sorted by name
  bool pass = false;
  int exit_code = kExitPass;
  std::string error;  // usage or admissibility message, empty otherwise
  double wall_seconds = 0.0;
};

Report run(const RunRequest& request);

// JSON text (wall time only with request.timing) or a human summary.
std::string render(const Report& report);
nlohmann::json report_to_json(const Report& report);

const std::vector<std::string>& subcommands();

}  // namespace spinc
