#include "trackaudit/tracker_db.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trackaudit/csv.hpp"
#include "trackaudit/strings.hpp"

namespace trackaudit::trackerdb {

namespace {

bool valid_dotted_prefix(std::string_view prefix) {
  if (prefix.empty()) return false;
  std::string_view body = prefix;
  if (body.back() == '.') body.remove_suffix(1);
  if (body.empty()) return false;
  for (auto label : strings::split(body, '.')) {
    if (label.empty()) return false;
    for (char c : label) {
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                c == '_' || c == '$' || c == '-';
      if (!ok) return false;
    }
  }
  return true;
}

std::string read_file(const std::filesystem::path& file, bool& ok) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    ok = false;
    return {};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  ok = true;
  return buf.str();
}

// "com\.google\.firebase" -> "com.google.firebase"; trailing ".*" dropped.
std::string normalize_signature_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (size_t i = 0; i < token.size(); ++i) {
    if (token[i] == '\\' && i + 1 < token.size()) {
      out.push_back(token[i + 1]);
      ++i;
    } else {
      out.push_back(token[i]);
    }
  }
  if (out.size() >= 2 && out.ends_with(".*")) out.resize(out.size() - 2);
  return std::string(strings::trim(out));
}

}  // namespace

std::string_view to_string(LoadErrorKind kind) {
  switch (kind) {
    case LoadErrorKind::Io: return "Io";
    case LoadErrorKind::BadPattern: return "BadPattern";
    case LoadErrorKind::DuplicatePattern: return "DuplicatePattern";
    case LoadErrorKind::BadFormat: return "BadFormat";
  }
  return "LoadError";
}

Result<EntityMap, LoadError> EntityMap::parse(std::string_view csv_text) {
  EntityMap map;
  std::set<std::string> seen;
  size_t line_no = 0;
  for (auto raw_line : strings::split(csv_text, '\n')) {
    ++line_no;
    auto line = strings::trim(raw_line);
    if (line.empty() || line.starts_with("#")) continue;
    size_t comma = line.find(',');
    if (comma == std::string_view::npos) {
      return LoadError{LoadErrorKind::BadFormat,
                       "entity map line " + std::to_string(line_no) + ": expected pattern,entity"};
    }
    std::string pattern(strings::trim(line.substr(0, comma)));
    std::string entity(strings::trim(line.substr(comma + 1)));
    if (pattern.empty() || entity.empty()) {
      return LoadError{LoadErrorKind::BadPattern,
                       "entity map line " + std::to_string(line_no) + ": empty pattern or entity"};
    }

    PatternKind kind;
    if (pattern.back() == '.') {
      if (!valid_dotted_prefix(pattern)) {
        return LoadError{LoadErrorKind::BadPattern,
                         "entity map line " + std::to_string(line_no) + ": bad prefix '" + pattern + "'"};
      }
      pattern = strings::to_lower(pattern);
      kind = PatternKind::DottedPrefix;
    } else if (pattern.find('.') != std::string::npos) {
      if (!valid_dotted_prefix(pattern)) {
        return LoadError{LoadErrorKind::BadPattern,
                         "entity map line " + std::to_string(line_no) + ": bad domain '" + pattern + "'"};
      }
      pattern = strings::to_lower(pattern);
      kind = PatternKind::Domain;
    } else {
      kind = PatternKind::NamePrefix;
    }
    if (!seen.insert(pattern).second) {
      return LoadError{LoadErrorKind::DuplicatePattern,
                       "entity map line " + std::to_string(line_no) + ": duplicate pattern '" +
                           pattern + "'"};
    }
    map.rules_.push_back({std::move(pattern), std::move(entity), kind});
  }
  return map;
}

Result<EntityMap, LoadError> EntityMap::load(const std::filesystem::path& file) {
  bool ok = false;
  std::string text = read_file(file, ok);
  if (!ok) return LoadError{LoadErrorKind::Io, "cannot open entity map: " + file.string()};
  return parse(text);
}

std::string EntityMap::attribute(std::string_view key) const {
  std::string lower = strings::to_lower(key);
  for (const auto& rule : rules_) {
    switch (rule.kind) {
      case PatternKind::DottedPrefix:
        if (lower.starts_with(rule.pattern)) return rule.entity;
        break;
      case PatternKind::Domain:
        if (lower == rule.pattern) return rule.entity;
        if (lower.size() > rule.pattern.size() &&
            lower.ends_with(rule.pattern) &&
            lower[lower.size() - rule.pattern.size() - 1] == '.') {
          return rule.entity;
        }
        break;
      case PatternKind::NamePrefix:
        if (key == rule.pattern) return rule.entity;
        if (key.size() > rule.pattern.size() && key.starts_with(rule.pattern) &&
            key[rule.pattern.size()] == ' ') {
          return rule.entity;
        }
        break;
    }
  }
  return std::string(kFallback);
}

std::string_view to_string(Category category) {
  switch (category) {
    case Category::Analytics: return "Analytics";
    case Category::Advertising: return "Advertising";
    case Category::Social: return "Social";
    case Category::Other: return "Other";
  }
  return "Other";
}

std::optional<Category> category_from_string(std::string_view s) {
  if (strings::iequals(s, "analytics")) return Category::Analytics;
  if (strings::iequals(s, "advertising")) return Category::Advertising;
  if (strings::iequals(s, "social")) return Category::Social;
  if (strings::iequals(s, "other")) return Category::Other;
  return std::nullopt;
}

Result<DomainBlocklist, LoadError> DomainBlocklist::load(const std::filesystem::path& file,
                                                         const PublicSuffixList& psl) {
  bool ok = false;
  std::string text = read_file(file, ok);
  if (!ok) return LoadError{LoadErrorKind::Io, "cannot open blocklist: " + file.string()};

  DomainBlocklist list;
  size_t line_no = 0;
  for (auto raw_line : strings::split(text, '\n')) {
    ++line_no;
    auto line = strings::trim(raw_line);
    if (line.empty() || line.starts_with("#")) continue;
    Category category = Category::Other;
    std::string_view domain_part = line;
    if (size_t comma = line.find(','); comma != std::string_view::npos) {
      domain_part = strings::trim(line.substr(0, comma));
      auto cat = category_from_string(strings::trim(line.substr(comma + 1)));
      if (!cat) {
        return LoadError{LoadErrorKind::BadFormat,
                         "blocklist line " + std::to_string(line_no) + ": unknown category"};
      }
      category = *cat;
    }
    auto resolved = registrable_domain(domain_part, psl);
    if (!resolved.ok()) {
      return LoadError{LoadErrorKind::BadPattern,
                       "blocklist line " + std::to_string(line_no) + ": unparseable domain"};
    }
    list.entries_[resolved.value().domain.value] = category;
  }
  return list;
}

std::optional<Category> DomainBlocklist::lookup(const RegistrableDomain& domain) const {
  auto it = entries_.find(domain.value);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Result<std::vector<TrackerSignature>, LoadError> parse_signatures(std::string_view json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    return LoadError{LoadErrorKind::BadFormat, "signature file must be a JSON array"};
  }

  auto read_tokens = [](const nlohmann::json& j, const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    const auto& v = j.at(key);
    if (v.is_string()) {
      const std::string joined = v.get<std::string>();
      for (auto piece : strings::split(joined, '|')) {
        std::string token = normalize_signature_token(piece);
        if (!token.empty()) out.push_back(std::move(token));
      }
    } else if (v.is_array()) {
      for (const auto& item : v) {
        if (!item.is_string()) continue;
        std::string token = normalize_signature_token(item.get<std::string>());
        if (!token.empty()) out.push_back(std::move(token));
      }
    }
    return out;
  };

  std::vector<TrackerSignature> sigs;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("name")) {
      return LoadError{LoadErrorKind::BadFormat, "signature entries need a name"};
    }
    TrackerSignature sig;
    sig.name = item.at("name").get<std::string>();
    sig.code_prefixes = read_tokens(item, "code_signature");
    sig.network_hosts = read_tokens(item, "network_signature");
    sig.owner = item.value("owner", "");
    if (sig.code_prefixes.empty() && sig.network_hosts.empty()) {
      return LoadError{LoadErrorKind::BadPattern,
                       "signature '" + sig.name + "' has neither code nor network patterns"};
    }
    for (const auto& prefix : sig.code_prefixes) {
      if (!valid_dotted_prefix(prefix)) {
        return LoadError{LoadErrorKind::BadPattern,
                         "signature '" + sig.name + "': bad code prefix '" + prefix + "'"};
      }
    }
    sigs.push_back(std::move(sig));
  }
  return sigs;
}

Result<std::vector<TrackerSignature>, LoadError> load_signatures(const std::filesystem::path& file) {
  bool ok = false;
  std::string text = read_file(file, ok);
  if (!ok) return LoadError{LoadErrorKind::Io, "cannot open signature file: " + file.string()};
  return parse_signatures(text);
}

}  // namespace trackaudit::trackerdb
