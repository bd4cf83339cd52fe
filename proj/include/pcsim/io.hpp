#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "pcsim/dpc.hpp"
#include "pcsim/radio_env.hpp"
#include "pcsim/runlog.hpp"

namespace pcsim {

inline constexpr int kSchemaVersion = 1;

// Doubles are written in shortest round-trip form, so every document below
// reads back bit-identical.

nlohmann::json to_json(const Scenario& scenario);
/// Validates the result; throws FormatError or InvalidScenario.
Scenario scenario_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const FeasibilityReport& report);
nlohmann::json to_json(const LinkMetrics& metrics);
nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& doc);

/// Scenario document with its FeasibilityReport embedded under "feasibility".
nlohmann::json scenario_document(const Scenario& scenario);

/// One line of rounds.jsonl.
nlohmann::json to_json(const RoundRecord& round);
RoundRecord round_from_json(const nlohmann::json& doc);

/// summary.json of a run: config echo, scenario, initial metrics,
/// diagnostics and final summary metrics.
nlohmann::json run_summary_document(const RunLog& run);

inline constexpr const char* kRunSummaryFile = "summary.json";
inline constexpr const char* kRoundsFile = "rounds.jsonl";
inline constexpr const char* kTrajectoryFile = "trajectory.csv";

/// Writes summary.json, rounds.jsonl and trajectory.csv into `dir`.
void write_run(const std::filesystem::path& dir, const RunLog& run);
RunLog read_run(const std::filesystem::path& dir);

/// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace pcsim
