#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trackaudit/domain.hpp"
#include "trackaudit/result.hpp"

namespace trackaudit::trackerdb {

enum class LoadErrorKind { Io, BadPattern, DuplicatePattern, BadFormat };

struct LoadError {
  LoadErrorKind kind;
  std::string detail;
};

std::string_view to_string(LoadErrorKind kind);

/// Maps tracker domains, package prefixes, and tracker names to the owning
/// organization. Data, not code: ownership changes over time. First matching
/// rule wins; every lookup falls back to "Autres".
class EntityMap {
 public:
  static constexpr std::string_view kFallback = "Autres";

  /// CSV rows "pattern,entity". Pattern kinds, decided by shape:
  ///   - trailing dot  -> dotted prefix  ("com.google." matches package names)
  ///   - contains dot  -> domain         (matches the domain and subdomains)
  ///   - otherwise     -> name prefix    (matches "Google ..." tracker names)
  static Result<EntityMap, LoadError> parse(std::string_view csv_text);
  static Result<EntityMap, LoadError> load(const std::filesystem::path& file);

  /// Total and deterministic; unmatched keys return kFallback.
  std::string attribute(std::string_view key) const;
  std::string attribute(const RegistrableDomain& domain) const { return attribute(domain.value); }

  size_t rule_count() const { return rules_.size(); }

 private:
  enum class PatternKind { DottedPrefix, Domain, NamePrefix };
  struct Rule {
    std::string pattern;
    std::string entity;
    PatternKind kind;
  };
  std::vector<Rule> rules_;
};

enum class Category { Analytics, Advertising, Social, Other };

std::string_view to_string(Category category);
std::optional<Category> category_from_string(std::string_view s);

/// Known tracking domains with a coarse purpose tag. File format: one
/// registrable domain per line, optional ",category", '#' comments.
class DomainBlocklist {
 public:
  static Result<DomainBlocklist, LoadError> load(const std::filesystem::path& file,
                                                 const PublicSuffixList& psl);

  std::optional<Category> lookup(const RegistrableDomain& domain) const;
  size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, Category> entries_;
};

/// A tracking SDK identified by code-package prefixes and/or network hosts.
struct TrackerSignature {
  std::string name;
  std::vector<std::string> code_prefixes;
  std::vector<std::string> network_hosts;
  std::string owner;
};

/// JSON list of {name, code_signature, network_signature, owner}. Signatures
/// may be arrays of prefixes or a single '|'-separated string (the common
/// published export shape); "\\." escapes and trailing ".*" are tolerated.
Result<std::vector<TrackerSignature>, LoadError> load_signatures(const std::filesystem::path& file);
Result<std::vector<TrackerSignature>, LoadError> parse_signatures(std::string_view json_text);

}  // namespace trackaudit::trackerdb
