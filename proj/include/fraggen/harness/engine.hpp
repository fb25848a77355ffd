#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fraggen::harness {

inline constexpr std::size_t kStderrCap = 64 * 1024;

// `{test}` in args (and in the extractor command) is replaced by the test
// file path, `{binary}` by the engine binary.
struct EngineConfig {
  std::string binary;
  std::vector<std::string> args = {"{test}"};
  double timeout_seconds = 5.0;
  std::map<std::string, std::string> env;
  std::vector<std::string> error_patterns = {"SyntaxError", "TypeError", "RangeError",
                                             "ReferenceError", "URIError"};
  // Optional backtrace extractor; its first non-empty stdout line is the
  // top frame.
  std::vector<std::string> extractor;

  // Throws EngineUnavailable when the binary is missing or not executable,
  // ConfigError on bad values.
  void validate() const;
  static EngineConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ExecutionOutcome {
  std::optional<int> exit_code;
  std::optional<int> signal;
  bool timed_out = false;
  std::string stderr_text;  // at most kStderrCap bytes
  double wall_seconds = 0.0;
};

enum class OutcomeClass { Pass, RuntimeError, Crash, Timeout, Other };

struct Classification {
  OutcomeClass kind = OutcomeClass::Other;
  std::string detail;  // error name or signal name
  friend bool operator==(const Classification&, const Classification&) = default;
};

std::string to_string(OutcomeClass c);
std::string signal_name(int sig);

// Runs `argv` with stdin closed and stdout discarded, capturing stderr and
// killing the process group after `timeout_seconds`. Throws EngineUnavailable
// if the program cannot be started.
ExecutionOutcome run_process(const std::vector<std::string>& argv, double timeout_seconds,
                             const std::map<std::string, std::string>& env = {},
                             std::string* stdout_text = nullptr);

// Writes `source` to <scratch>/test.js and runs the engine on it.
ExecutionOutcome execute(const EngineConfig& cfg, const std::string& source,
                         const std::filesystem::path& scratch);

Classification classify(const ExecutionOutcome& outcome, const EngineConfig& cfg);

// "<SIGNAL>-<16 hex>": a hash of the extractor's top frame when one is
// configured and succeeds, else of the last non-empty stderr line.
std::string dedup_key(const ExecutionOutcome& outcome, const EngineConfig& cfg,
                      const std::filesystem::path& test_file);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace fraggen::harness
