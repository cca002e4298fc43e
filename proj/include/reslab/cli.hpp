#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace reslab {

struct ExperimentSpec {
  std::string command;  // zeta, det, resonances, trace-check, counterexample, nuclear, gevrey
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json output = nlohmann::json::object();  // {"csv": name, "json": name}
  std::optional<std::uint64_t> seed;
};

// Strict parse: unknown fields, wrong types and malformed JSON raise SchemaError with a JSON path.
ExperimentSpec parse_experiment_spec(const std::string& text);
const std::vector<std::string>& experiment_commands();

struct RunOptions {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

struct CheckLine {
  std::string name;
  std::string verdict;  // PASS, FAIL or UNDETERMINED
  std::string tolerance;
  std::string detail;
};

struct RunResult {
  std::vector<CheckLine> checks;
  std::map<std::string, std::string> artifacts;  // file name -> content
  bool failed() const;
};

// Computes everything in memory; nothing touches the file system.
RunResult run_experiment(const ExperimentSpec& spec, const RunOptions& options);
void write_artifacts(const RunResult& result, const std::filesystem::path& out_dir);
std::string format_check(const CheckLine& c);

// Exit codes: 0 success, 1 numerical failure, 2 usage or schema error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace reslab
