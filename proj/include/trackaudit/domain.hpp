#pragma once

#include <compare>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "trackaudit/result.hpp"

namespace trackaudit {

/// Normalized eTLD+1 identity. All cross-domain comparisons (email sender vs
/// resource, cookie vs site) happen on this value. Lowercase, no scheme,
/// path, port, or userinfo.
struct RegistrableDomain {
  std::string value;

  friend auto operator<=>(const RegistrableDomain&, const RegistrableDomain&) = default;
};

enum class HostError {
  EmptyHost,
  UnparseableHost,
};

std::string_view to_string(HostError err);

/// Outcome of registrable-domain resolution. IP literals and hosts that are
/// themselves a public suffix carry the input verbatim with
/// registrable == false; they never equal a true eTLD+1 by accident.
struct HostDomain {
  RegistrableDomain domain;
  bool registrable = true;
  bool ip_literal = false;
};

/// Public suffix ruleset in the standard text format: one rule per line,
/// "//" comments, "*." wildcard rules, "!" exception rules. Immutable after
/// parse; safe for shared concurrent use.
class PublicSuffixList {
 public:
  static Result<PublicSuffixList, std::string> parse(std::string_view text);
  static Result<PublicSuffixList, std::string> load(const std::filesystem::path& file);

  size_t rule_count() const { return exact_.size() + wildcard_.size() + exception_.size(); }

  /// Number of labels of the prevailing public suffix for the given host
  /// labels (longest matching rule; exception rules drop their leftmost
  /// label; unmatched hosts fall back to the implicit "*" rule).
  size_t suffix_label_count(const std::vector<std::string_view>& labels) const;

  /// The public suffix of a normalized hostname ("stats.info.ameli.fr" -> "fr",
  /// "oups.gouv.fr" -> "gouv.fr").
  std::string public_suffix(std::string_view normalized_host) const;

 private:
  std::unordered_set<std::string> exact_;
  std::unordered_set<std::string> wildcard_;   // "*.kawasaki.jp" stored as "kawasaki.jp"
  std::unordered_set<std::string> exception_;  // "!city.kawasaki.jp" stored as "city.kawasaki.jp"
};

/// Lowercases, strips a trailing dot, and validates hostname syntax.
/// IPv4/IPv6 literals are accepted and flagged.
Result<HostDomain, HostError> registrable_domain(std::string_view host, const PublicSuffixList& psl);

/// Registrable domains exempt from external-actor reporting. Default
/// contains w3.org (markup namespace URLs, not trackers). Matching is by
/// registrable domain, so subdomains of an entry match too.
class Allowlist {
 public:
  Allowlist();

  /// File format: one registrable domain per line, '#' comments.
  static Result<Allowlist, std::string> load(const std::filesystem::path& file,
                                             const PublicSuffixList& psl);

  void add(RegistrableDomain domain);
  bool contains(const RegistrableDomain& domain) const;
  size_t size() const { return entries_.size(); }

 private:
  std::set<std::string> entries_;
};

enum class OriginKind { Internal, External, Allowlisted };

std::string_view to_string(OriginKind kind);

struct ParsedUrl {
  std::string scheme;  // lowercase; empty for scheme-relative ("//host/x")
  std::string host;    // lowercase, no brackets for IPv6
  std::string port;
  std::string rest;    // path + query + fragment, verbatim
  bool has_authority = false;
};

/// Accepts absolute URLs ("https://h/p") and network-path references
/// ("//h/p"). Anything without an authority component (mailto:, tel:, cid:,
/// relative paths) is UnparseableHost.
Result<ParsedUrl, HostError> parse_url(std::string_view url);

struct OriginResult {
  OriginKind kind = OriginKind::External;
  HostDomain host_domain;
  std::string host;  // full hostname, for debug output
};

/// Internal iff the URL's registrable domain equals the sender's; otherwise
/// Allowlisted if it matches the allowlist; External otherwise. Pure in
/// (domain(url), sender, allowlist): paths and queries never matter.
Result<OriginResult, HostError> classify_origin(std::string_view url,
                                                const RegistrableDomain& sender,
                                                const Allowlist& allow,
                                                const PublicSuffixList& psl);

}  // namespace trackaudit
