#include "trackaudit/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "trackaudit/strings.hpp"

namespace trackaudit::config {

Result<RunConfig, std::string> parse_config_text(std::string_view text) {
  RunConfig cfg;
  size_t line_no = 0;
  for (auto raw_line : strings::split(text, '\n')) {
    ++line_no;
    auto line = strings::trim(raw_line);
    if (line.empty() || line.starts_with("#")) continue;
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return "config line " + std::to_string(line_no) + ": expected key=value";
    }
    std::string key = strings::to_lower(strings::trim(line.substr(0, eq)));
    std::string value(strings::trim(line.substr(eq + 1)));
    if (value.empty()) continue;

    auto as_int = [&](int& slot) -> std::optional<std::string> {
      char* end = nullptr;
      long v = std::strtol(value.c_str(), &end, 10);
      if (end != value.c_str() + value.size() || v < 0) {
        return "config line " + std::to_string(line_no) + ": bad number for " + key;
      }
      slot = static_cast<int>(v);
      return std::nullopt;
    };

    std::optional<std::string> err;
    if (key == "psl") cfg.psl = value;
    else if (key == "allowlist") cfg.allowlist = value;
    else if (key == "signatures") cfg.signatures = value;
    else if (key == "entity_map") cfg.entity_map = value;
    else if (key == "blocklist") cfg.blocklist = value;
    else if (key == "intrusive") cfg.intrusive = value;
    else if (key == "parallel") err = as_int(cfg.parallel);
    else if (key == "timeout") err = as_int(cfg.timeout_seconds);
    else if (key == "redirect_limit") err = as_int(cfg.redirect_limit);
    else return "config line " + std::to_string(line_no) + ": unknown key '" + key + "'";
    if (err) return *err;
  }
  return cfg;
}

Result<RunConfig, std::string> load_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return "cannot open config file: " + file.string();
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Result<RunConfig, std::string> load_env_config() {
  const char* path = std::getenv("TRACKAUDIT_CONFIG");
  if (path == nullptr || *path == '\0') return RunConfig{};
  return load_config_file(path);
}

}  // namespace trackaudit::config
