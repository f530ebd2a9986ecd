#pragma once

// Reference public-suffix matcher used as the independent oracle: keeps every
// rule as a label vector and scans them all per lookup, straight from the
// published matching algorithm. Deliberately naive; shares no code with the
// library implementation.

#include <string>
#include <string_view>
#include <vector>

namespace psl_oracle {

struct Rule {
  std::vector<std::string> labels;  // leftmost first; "*" matches one label
  bool exception = false;
};

inline std::vector<std::string> split_labels(std::string_view host) {
  std::vector<std::string> labels;
  std::string current;
  for (char c : host) {
    if (c == '.') {
      labels.push_back(current);
      current.clear();
    } else {
      current.push_back(
          (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    }
  }
  labels.push_back(current);
  return labels;
}

inline std::vector<Rule> parse_rules(std::string_view text) {
  std::vector<Rule> rules;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.substr(0, 2) == "//") continue;
    size_t ws = line.find_first_of(" \t");
    if (ws != std::string_view::npos) line = line.substr(0, ws);
    Rule rule;
    if (line.front() == '!') {
      rule.exception = true;
      line.remove_prefix(1);
    }
    rule.labels = split_labels(line);
    rules.push_back(std::move(rule));
  }
  return rules;
}

inline bool rule_matches(const Rule& rule, const std::vector<std::string>& host) {
  if (rule.labels.size() > host.size()) return false;
  size_t offset = host.size() - rule.labels.size();
  for (size_t i = 0; i < rule.labels.size(); ++i) {
    if (rule.labels[i] == "*") continue;
    if (rule.labels[i] != host[offset + i]) return false;
  }
  return true;
}

// Returns the registrable domain (eTLD+1), or "" when the host is itself a
// public suffix.
inline std::string registrable(std::string_view host, const std::vector<Rule>& rules) {
  std::vector<std::string> labels = split_labels(host);
  size_t best = 0;
  bool have_exception = false;
  size_t exception_len = 0;
  for (const auto& rule : rules) {
    if (!rule_matches(rule, labels)) continue;
    if (rule.exception) {
      if (rule.labels.size() > exception_len) {
        have_exception = true;
        exception_len = rule.labels.size();
      }
    } else if (rule.labels.size() > best) {
      best = rule.labels.size();
    }
  }
  size_t suffix_len;
  if (have_exception) {
    suffix_len = exception_len - 1;  // exception rule drops its leftmost label
  } else if (best > 0) {
    suffix_len = best;
  } else {
    suffix_len = 1;  // implicit "*"
  }
  if (suffix_len >= labels.size()) return "";
  std::string out;
  for (size_t i = labels.size() - suffix_len - 1; i < labels.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out += labels[i];
  }
  return out;
}

}  // namespace psl_oracle
