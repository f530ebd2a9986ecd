#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "trackaudit/result.hpp"

namespace trackaudit::config {

/// Baseline settings shared by the subcommands. Values come from the file
/// named by TRACKAUDIT_CONFIG (simple key=value lines, '#' comments); every
/// command-line flag overrides its key.
struct RunConfig {
  std::optional<std::filesystem::path> psl;
  std::optional<std::filesystem::path> allowlist;
  std::optional<std::filesystem::path> signatures;
  std::optional<std::filesystem::path> entity_map;
  std::optional<std::filesystem::path> blocklist;
  std::optional<std::filesystem::path> intrusive;
  int parallel = 1;
  int timeout_seconds = 30;
  int redirect_limit = 5;
};

Result<RunConfig, std::string> parse_config_text(std::string_view text);
Result<RunConfig, std::string> load_config_file(const std::filesystem::path& file);

/// Reads TRACKAUDIT_CONFIG when set; an unset variable yields defaults.
Result<RunConfig, std::string> load_env_config();

}  // namespace trackaudit::config
