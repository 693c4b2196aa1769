#pragma once

// Command pipeline behind the `afp` tool and its JSON report.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "afp/spec.hpp"

namespace afp {

enum class Command { Check, Classify, Solve, Fset, Verify, Report };
const char* command_name(Command c) noexcept;
std::optional<Command> command_from_name(std::string_view name);

inline constexpr int kSchemaVersion = 1;

/// Exit codes of the tool.
enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitParse = 2, kExitFault = 3 };

struct RunFlags {
  std::optional<double> epsilon;
  std::optional<double> x0;
  std::optional<std::size_t> k;
  std::optional<double> grid;
  std::optional<std::size_t> budget;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> json_path;
  std::optional<std::filesystem::path> csv_path;
  bool strict = false;
};

struct Warning {
  std::string code;     // cyclicity, coverage, vacuous_diameter, rate, orbit, sampled
  std::string message;
  nlohmann::json witnesses = nlohmann::json::array();
};

struct RunReport {
  int schema_version = kSchemaVersion;
  std::string spec_digest;  // FNV-1a 64 of the canonical spec text, hex
  Command command = Command::Check;
  nlohmann::json settings = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<Warning> warnings;
  std::vector<std::string> failures;
  std::optional<nlohmann::json> error;  // parse or evaluation fault
  int exit_code = kExitOk;

  nlohmann::json to_json() const;
};

/// FNV-1a 64-bit hash as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

/// Runs a command against a spec file. Faults are captured in the report
/// (exit 2 for parse errors, 3 for evaluation and domain faults) rather than
/// thrown. Output files named in `flags` are written atomically; a write
/// failure is reported as a fault.
RunReport execute(Command command, const std::filesystem::path& spec_path, const RunFlags& flags);

/// Same, from spec text already in memory.
RunReport execute_text(Command command, std::string_view spec_text, const RunFlags& flags);

/// Human-readable summary.
std::string render_text(const RunReport& report);

/// Writes `content` to a sibling temporary file, then renames it over `path`.
void write_atomically(const std::filesystem::path& path, std::string_view content);

}  // namespace afp
