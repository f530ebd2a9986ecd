#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackaudit/result.hpp"
#include "trackaudit/tracker_db.hpp"

namespace trackaudit::app {

enum class Decision { PublicService, NotPublicService, Skipped, Undecided };

std::string_view to_string(Decision decision);
std::optional<Decision> decision_from_string(std::string_view s);

/// The four questions of the labeling workflow: developer name public?
/// app name plausible? app id carries a public extension? website redirects
/// to a public service?
struct Criteria {
  std::optional<bool> c1, c2, c3, c4;

  bool complete() const { return c1 && c2 && c3 && c4; }
};

struct AppRecord {
  std::string app_id;
  std::string title;
  std::string developer;
  std::string website;
  std::string keyword;  // search keyword the app was collected under
  Criteria criteria;
  Decision decision = Decision::Undecided;
  std::vector<std::string> permissions;  // deduplicated, sorted
  std::vector<std::string> trackers;     // deduplicated, sorted
};

/// An app is a public service iff at least two criteria hold, among which
/// criterion 1 and/or criterion 4.
bool classify_public_service(bool c1, bool c2, bool c3, bool c4);

/// Tracker reported iff any class name starts with one of its code prefixes
/// at a label boundary ("com.google" never matches "com.googleX").
/// Result deduplicated and sorted by name.
std::vector<std::string> scan_classes(std::span<const std::string> class_names,
                                      std::span<const trackerdb::TrackerSignature> sigs);

struct AppDump {
  AppRecord record;
  std::vector<std::string> classes;
};

Result<AppDump, std::string> parse_app_dump(const nlohmann::json& j);
Result<AppDump, std::string> load_app_dump(const std::filesystem::path& file);
Result<std::vector<AppRecord>, std::string> load_app_list(const std::filesystem::path& file);

nlohmann::ordered_json record_to_json(const AppRecord& record);
Result<AppRecord, std::string> record_from_json(const nlohmann::json& j);

struct PermissionSummary {
  double mean_permissions = 0.0;  // rounded to 2 decimals
  double mean_trackers = 0.0;
  // (permission, percent of apps requesting it), percent descending then name.
  std::vector<std::pair<std::string, double>> permission_frequency;
  std::vector<std::pair<std::string, double>> intrusive_frequency;
};

Result<PermissionSummary, std::string> permission_summary(std::span<const AppRecord> apps,
                                                          const std::set<std::string>& intrusive);

/// Fig-2-style default: the permissions most intrusive for user privacy.
const std::set<std::string>& default_intrusive_permissions();
Result<std::set<std::string>, std::string> load_permission_list(const std::filesystem::path& file);

struct EntityShare {
  std::string entity;
  long long occurrences = 0;
  int percent = 0;  // rounded; shares sum to 100 +- rounding
};

/// Tracker occurrences (one per app-tracker pair) attributed to owning
/// entities; unmatched trackers fall into "Autres".
Result<std::vector<EntityShare>, std::string> tracker_identity_table(
    std::span<const AppRecord> apps, const trackerdb::EntityMap& entities);

/// Exodus-style red flag: too many permissions or trackers.
bool red_flag(const AppRecord& record, int max_permissions = 10, int max_trackers = 5);

struct AnswerEntry {
  std::string app_id;
  Criteria criteria;
  Decision decision = Decision::Undecided;
};

std::string answer_log_header();
std::string answer_entry_csv(const AnswerEntry& entry);
Result<std::vector<AnswerEntry>, std::string> load_answer_log(const std::filesystem::path& file);

struct LabelOutcome {
  std::vector<AppRecord> apps;
  int prompted = 0;
  int resumed = 0;
};

/// Terminal labeling loop: per app, y/n for each criterion, then a final
/// y/n/t. "t" records the current app as NotPublicService and skips the rest
/// of its keyword group. Answers are appended to `log_path` as they are
/// given, so an interrupted session resumes from the log. End of input
/// leaves remaining apps Undecided.
LabelOutcome label_interactively(std::vector<AppRecord> apps, std::istream& answers,
                                 std::ostream& out, const std::filesystem::path& log_path);

}  // namespace trackaudit::app
