#include "trackaudit/app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "trackaudit/csv.hpp"
#include "trackaudit/strings.hpp"

namespace trackaudit::app {

namespace {

std::vector<std::string> dedupe_sorted(std::vector<std::string> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

double round2(double v) { return std::llround(v * 100.0) / 100.0; }

// Label-boundary prefix trie over dotted identifiers.
struct PrefixTrie {
  struct Node {
    std::map<std::string, Node, std::less<>> children;
    std::vector<size_t> terminal;  // signature indices whose prefix ends here
  };
  Node root;

  void insert(std::string_view prefix, size_t sig_index) {
    std::string_view body = prefix;
    if (!body.empty() && body.back() == '.') body.remove_suffix(1);
    Node* node = &root;
    for (auto label : strings::split(body, '.')) {
      auto it = node->children.find(label);
      if (it == node->children.end()) {
        it = node->children.emplace(std::string(label), Node{}).first;
      }
      node = &it->second;
    }
    node->terminal.push_back(sig_index);
  }

  void match(std::string_view class_name, std::vector<bool>& hit) const {
    const Node* node = &root;
    for (auto label : strings::split(class_name, '.')) {
      auto it = node->children.find(label);
      if (it == node->children.end()) return;
      node = &it->second;
      for (size_t idx : node->terminal) hit[idx] = true;
    }
  }
};

char answer_char(std::optional<bool> v) {
  if (!v) return ' ';
  return *v ? 'y' : 'n';
}

std::optional<bool> answer_from_char(std::string_view s) {
  auto t = strings::trim(s);
  if (t == "y") return true;
  if (t == "n") return false;
  return std::nullopt;
}

// Reads tokens until a valid answer or end of input. Valid answers are the
// characters in `allowed`.
std::optional<char> prompt_answer(std::istream& in, std::ostream& out, std::string_view question,
                                  std::string_view allowed) {
  std::string line;
  while (true) {
    out << question << " [" << allowed << "] " << std::flush;
    if (!std::getline(in, line)) return std::nullopt;
    std::string t = strings::to_lower(strings::trim(line));
    if (t.size() == 1 && allowed.find(t[0]) != std::string_view::npos) return t[0];
    out << "please answer one of [" << allowed << "]\n";
  }
}

}  // namespace

std::string_view to_string(Decision decision) {
  switch (decision) {
    case Decision::PublicService: return "public_service";
    case Decision::NotPublicService: return "not_public_service";
    case Decision::Skipped: return "skipped";
    case Decision::Undecided: return "undecided";
  }
  return "undecided";
}

std::optional<Decision> decision_from_string(std::string_view s) {
  if (s == "public_service") return Decision::PublicService;
  if (s == "not_public_service") return Decision::NotPublicService;
  if (s == "skipped") return Decision::Skipped;
  if (s == "undecided") return Decision::Undecided;
  return std::nullopt;
}

bool classify_public_service(bool c1, bool c2, bool c3, bool c4) {
  int count = int(c1) + int(c2) + int(c3) + int(c4);
  return count >= 2 && (c1 || c4);
}

std::vector<std::string> scan_classes(std::span<const std::string> class_names,
                                      std::span<const trackerdb::TrackerSignature> sigs) {
  PrefixTrie trie;
  for (size_t i = 0; i < sigs.size(); ++i) {
    for (const auto& prefix : sigs[i].code_prefixes) {
      trie.insert(strings::to_lower(prefix), i);
    }
  }
  std::vector<bool> hit(sigs.size(), false);
  for (const auto& name : class_names) {
    trie.match(strings::to_lower(name), hit);
  }
  std::vector<std::string> matched;
  for (size_t i = 0; i < sigs.size(); ++i) {
    if (hit[i]) matched.push_back(sigs[i].name);
  }
  return dedupe_sorted(std::move(matched));
}

Result<AppDump, std::string> parse_app_dump(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("app_id")) {
    return std::string("app dump must be an object with app_id");
  }
  try {
    AppDump dump;
    dump.record.app_id = j.at("app_id").get<std::string>();
    dump.record.title = j.value("title", "");
    dump.record.developer = j.value("developer", "");
    dump.record.website = j.value("website", "");
    dump.record.keyword = j.value("keyword", "");
    if (j.contains("permissions")) {
      dump.record.permissions = dedupe_sorted(j.at("permissions").get<std::vector<std::string>>());
    }
    if (j.contains("classes")) {
      dump.classes = j.at("classes").get<std::vector<std::string>>();
    }
    return dump;
  } catch (const nlohmann::json::exception& e) {
    return std::string("bad app dump: ") + e.what();
  }
}

Result<AppDump, std::string> load_app_dump(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return "cannot open app dump: " + file.string();
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) return "invalid JSON in " + file.string();
  return parse_app_dump(j);
}

Result<std::vector<AppRecord>, std::string> load_app_list(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return "cannot open app list: " + file.string();
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    return "app list must be a JSON array: " + file.string();
  }
  std::vector<AppRecord> apps;
  for (const auto& item : doc) {
    auto dump = parse_app_dump(item);
    if (!dump.ok()) return dump.error();
    apps.push_back(std::move(dump.value().record));
  }
  return apps;
}

nlohmann::ordered_json record_to_json(const AppRecord& record) {
  nlohmann::ordered_json j;
  j["app_id"] = record.app_id;
  j["title"] = record.title;
  j["developer"] = record.developer;
  if (!record.website.empty()) j["website"] = record.website;
  if (!record.keyword.empty()) j["keyword"] = record.keyword;
  j["decision"] = std::string(to_string(record.decision));
  j["permissions"] = record.permissions;
  j["trackers"] = record.trackers;
  j["permission_count"] = record.permissions.size();
  j["tracker_count"] = record.trackers.size();
  j["flagged"] = red_flag(record);
  return j;
}

Result<AppRecord, std::string> record_from_json(const nlohmann::json& j) {
  auto dump = parse_app_dump(j);
  if (!dump.ok()) return dump.error();
  AppRecord record = std::move(dump.value().record);
  if (j.contains("trackers")) {
    try {
      record.trackers = dedupe_sorted(j.at("trackers").get<std::vector<std::string>>());
    } catch (const nlohmann::json::exception& e) {
      return std::string("bad trackers list: ") + e.what();
    }
  }
  if (j.contains("decision")) {
    if (auto d = decision_from_string(j.at("decision").get<std::string>())) {
      record.decision = *d;
    }
  }
  return record;
}

Result<PermissionSummary, std::string> permission_summary(std::span<const AppRecord> apps,
                                                          const std::set<std::string>& intrusive) {
  if (apps.empty()) return std::string("EmptyInput: no apps to summarize");

  PermissionSummary summary;
  long long total_permissions = 0;
  long long total_trackers = 0;
  std::map<std::string, long long> permission_counts;
  for (const auto& a : apps) {
    total_permissions += static_cast<long long>(a.permissions.size());
    total_trackers += static_cast<long long>(a.trackers.size());
    for (const auto& p : a.permissions) ++permission_counts[p];
  }
  const double n = static_cast<double>(apps.size());
  summary.mean_permissions = round2(total_permissions / n);
  summary.mean_trackers = round2(total_trackers / n);

  for (const auto& [permission, count] : permission_counts) {
    double percent = round2(100.0 * count / n);
    summary.permission_frequency.emplace_back(permission, percent);
    if (intrusive.contains(permission)) {
      summary.intrusive_frequency.emplace_back(permission, percent);
    }
  }
  auto by_percent_desc = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  std::sort(summary.permission_frequency.begin(), summary.permission_frequency.end(),
            by_percent_desc);
  std::sort(summary.intrusive_frequency.begin(), summary.intrusive_frequency.end(),
            by_percent_desc);
  return summary;
}

const std::set<std::string>& default_intrusive_permissions() {
  static const std::set<std::string> kDefault = {
      "android.permission.ACCESS_FINE_LOCATION",
      "android.permission.ACCESS_COARSE_LOCATION",
      "android.permission.ACCESS_BACKGROUND_LOCATION",
      "android.permission.READ_EXTERNAL_STORAGE",
      "android.permission.WRITE_EXTERNAL_STORAGE",
      "android.permission.WAKE_LOCK",
      "android.permission.READ_PHONE_STATE",
      "android.permission.READ_CALENDAR",
      "android.permission.ACCESS_WIFI_STATE",
      "android.permission.ACCESS_GPS",
  };
  return kDefault;
}

Result<std::set<std::string>, std::string> load_permission_list(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return "cannot open permission list: " + file.string();
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto entry = strings::trim(line);
    if (entry.empty() || entry.starts_with("#")) continue;
    out.insert(std::string(entry));
  }
  return out;
}

Result<std::vector<EntityShare>, std::string> tracker_identity_table(
    std::span<const AppRecord> apps, const trackerdb::EntityMap& entities) {
  if (apps.empty()) return std::string("EmptyInput: no apps");

  std::map<std::string, long long> counts;
  long long total = 0;
  for (const auto& a : apps) {
    for (const auto& tracker : a.trackers) {
      ++counts[entities.attribute(tracker)];
      ++total;
    }
  }
  if (total == 0) return std::string("EmptyInput: no tracker occurrences");

  std::vector<EntityShare> shares;
  shares.reserve(counts.size());
  for (const auto& [entity, count] : counts) {
    EntityShare share;
    share.entity = entity;
    share.occurrences = count;
    share.percent = static_cast<int>(std::llround(100.0 * count / total));
    shares.push_back(std::move(share));
  }
  std::sort(shares.begin(), shares.end(), [](const EntityShare& a, const EntityShare& b) {
    if (a.occurrences != b.occurrences) return a.occurrences > b.occurrences;
    return a.entity < b.entity;
  });
  return shares;
}

bool red_flag(const AppRecord& record, int max_permissions, int max_trackers) {
  return static_cast<int>(record.permissions.size()) > max_permissions ||
         static_cast<int>(record.trackers.size()) > max_trackers;
}

std::string answer_log_header() { return "app_id,c1,c2,c3,c4,decision"; }

std::string answer_entry_csv(const AnswerEntry& entry) {
  auto cell = [](std::optional<bool> v) {
    return v ? std::string(1, answer_char(v)) : std::string();
  };
  return csv::join_row({entry.app_id, cell(entry.criteria.c1), cell(entry.criteria.c2),
                        cell(entry.criteria.c3), cell(entry.criteria.c4),
                        std::string(to_string(entry.decision))});
}

Result<std::vector<AnswerEntry>, std::string> load_answer_log(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return "cannot open answer log: " + file.string();
  std::ostringstream buf;
  buf << in.rdbuf();
  auto rows = csv::parse(buf.str());
  std::vector<AnswerEntry> entries;
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.empty() || (i == 0 && !row.empty() && row[0] == "app_id")) continue;
    if (row.size() != 6) {
      return "answer log row " + std::to_string(i + 1) + ": expected 6 columns";
    }
    AnswerEntry entry;
    entry.app_id = row[0];
    entry.criteria.c1 = answer_from_char(row[1]);
    entry.criteria.c2 = answer_from_char(row[2]);
    entry.criteria.c3 = answer_from_char(row[3]);
    entry.criteria.c4 = answer_from_char(row[4]);
    auto decision = decision_from_string(row[5]);
    if (!decision) {
      return "answer log row " + std::to_string(i + 1) + ": unknown decision '" + row[5] + "'";
    }
    entry.decision = *decision;
    entries.push_back(std::move(entry));
  }
  return entries;
}

LabelOutcome label_interactively(std::vector<AppRecord> apps, std::istream& answers,
                                 std::ostream& out, const std::filesystem::path& log_path) {
  LabelOutcome outcome;

  std::map<std::string, AnswerEntry> replayed;
  bool have_log = std::filesystem::exists(log_path);
  if (have_log) {
    auto loaded = load_answer_log(log_path);
    if (loaded.ok()) {
      for (auto& entry : loaded.value()) replayed[entry.app_id] = std::move(entry);
    }
  }

  std::ofstream log(log_path, std::ios::app);
  if (!have_log || std::filesystem::file_size(log_path) == 0) {
    log << answer_log_header() << '\n';
  }

  auto persist = [&](const AppRecord& record) {
    AnswerEntry entry{record.app_id, record.criteria, record.decision};
    log << answer_entry_csv(entry) << '\n';
    log.flush();
  };

  bool input_exhausted = false;
  std::string skip_keyword;  // group being skipped after a 't'
  bool skipping = false;

  for (auto& record : apps) {
    if (auto it = replayed.find(record.app_id); it != replayed.end()) {
      record.criteria = it->second.criteria;
      record.decision = it->second.decision;
      ++outcome.resumed;
      continue;
    }
    if (input_exhausted) {
      record.decision = Decision::Undecided;
      continue;
    }
    if (skipping && record.keyword == skip_keyword) {
      record.decision = Decision::Skipped;
      persist(record);
      continue;
    }
    skipping = false;

    out << "\napp: " << record.title << "\ndeveloper: " << record.developer
        << "\nid: " << record.app_id << "\nwebsite: " << record.website << "\n";

    static const char* kQuestions[4] = {
        "1) developer name concerns a public domain?",
        "2) app name matches a plausible public service?",
        "3) app id contains a public-service extension?",
        "4) app redirects to a public-service website?",
    };
    std::optional<bool>* slots[4] = {&record.criteria.c1, &record.criteria.c2,
                                     &record.criteria.c3, &record.criteria.c4};
    bool aborted = false;
    for (int i = 0; i < 4 && !aborted; ++i) {
      auto answer = prompt_answer(answers, out, kQuestions[i], "yn");
      if (!answer) {
        aborted = true;
        break;
      }
      *slots[i] = (*answer == 'y');
    }
    if (aborted) {
      input_exhausted = true;
      record.decision = Decision::Undecided;
      continue;
    }

    auto final_answer = prompt_answer(answers, out, "public service?", "ynt");
    if (!final_answer) {
      input_exhausted = true;
      record.decision = Decision::Undecided;
      continue;
    }
    ++outcome.prompted;
    if (*final_answer == 't') {
      // Skip to the next keyword; the current app counts as a no.
      record.decision = Decision::NotPublicService;
      skipping = true;
      skip_keyword = record.keyword;
    } else if (*final_answer == 'y') {
      bool rule = classify_public_service(*record.criteria.c1, *record.criteria.c2,
                                          *record.criteria.c3, *record.criteria.c4);
      if (rule) {
        record.decision = Decision::PublicService;
      } else {
        out << "criteria rule not met (need >=2 including 1 and/or 4); recording as no\n";
        record.decision = Decision::NotPublicService;
      }
    } else {
      record.decision = Decision::NotPublicService;
    }
    persist(record);
  }

  outcome.apps = std::move(apps);
  return outcome;
}

}  // namespace trackaudit::app
