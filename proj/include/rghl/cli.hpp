#pragma once

// Run-config parsing and the `run` / `compare` commands.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rghl/bench.hpp"

namespace rghl::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutEnv = "RGHL_OUT";
inline constexpr const char* kDefaultOutDir = "rghl_out";

struct RunConfigFile {
  bench::ExperimentConfig experiment;
  std::optional<std::string> output_dir;
  bool record_wall_time = false;
};

// Strict: unknown keys and wrong types raise ConfigError.
RunConfigFile parse_config(const nlohmann::json& doc);
RunConfigFile load_config(const std::filesystem::path& path);

// Every field with its effective value, defaults included. Parsing the
// result yields the same configuration.
nlohmann::json resolved_config(const RunConfigFile& cfg);

// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string digest(const std::string& text);

struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> repeats;
  std::optional<std::size_t> jobs;
};

// --out beats output_dir in the file, which beats $RGHL_OUT.
std::filesystem::path output_directory(const RunConfigFile& cfg,
                                       const Overrides& ov);

// Exit codes: 0 success, 1 config error, 2 runtime failure.
int cmd_run(const std::filesystem::path& config, const Overrides& ov,
            std::ostream& out, std::ostream& err);
int cmd_compare(const std::filesystem::path& config, const Overrides& ov,
                std::ostream& out, std::ostream& err);

// Strategies sorted by mean final best, with 95% intervals.
std::string leaderboard(const bench::ExperimentResult& result);

}  // namespace rghl::cli
