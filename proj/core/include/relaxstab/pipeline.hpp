#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relaxstab/config.hpp"
#include "relaxstab/profile.hpp"
#include "relaxstab/system.hpp"

namespace relaxstab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Rankine-Hugoniot speed of the first conservation law, or the configured speed.
double profile_speed(const SystemSpec& sys, const ProfileSettings& settings);

/// Builds the profile the settings ask for; "auto" takes the closed form for the 1-d Jin-Xin
/// system and shooting otherwise.
WaveProfile build_profile(const SystemSpec& sys, const RunConfig& cfg);

struct RunResult {
  /// Deterministic summary: config echo, one section per executed pipeline, certificate table.
  nlohmann::json summary;
  int exit_status = 0;
};

/// Executes cfg.pipeline, writes artifacts under cfg.output (summary.json plus CSVs).
/// Module errors are recorded in their section; the exit status is the first error's code,
/// else 4 if some certificate failed, else 0. `log` receives progress lines when non-null.
RunResult run(const RunConfig& cfg, std::ostream* log = nullptr);

/// Merges summaries (files or run directories) into one certificate table. Throws a usage error
/// for an empty list and a compatibility error when schema or tool versions differ.
nlohmann::json merge_reports(const std::vector<std::filesystem::path>& paths);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Two-space indented dump with a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace relaxstab
