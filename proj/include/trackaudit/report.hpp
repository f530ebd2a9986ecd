#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "trackaudit/app.hpp"
#include "trackaudit/email.hpp"
#include "trackaudit/result.hpp"
#include "trackaudit/tracker_db.hpp"
#include "trackaudit/web.hpp"

namespace trackaudit::report {

/// Cross-session per-domain counters, as in the most-present-domains figure.
struct DomainTally {
  std::string domain;
  long long first_cookies = 0;
  long long third_cookies = 0;
  long long third_requests = 0;

  long long total() const { return first_cookies + third_cookies + third_requests; }
  friend bool operator==(const DomainTally&, const DomainTally&) = default;
};

/// One tally per registrable domain over all sessions (cookies deduped per
/// session first). Order-insensitive in the input; output sorted by total
/// descending, then domain ascending.
std::vector<DomainTally> domain_tallies(std::span<const web::CaptureSession> sessions,
                                        const PublicSuffixList& psl);

/// Top n sites by third-party cookie count, descending; ties broken by site
/// name ascending.
std::vector<web::SiteSummary> top_sites_by_third_cookies(std::vector<web::SiteSummary> summaries,
                                                         size_t n);

enum class Format { Csv, Jsonl, Markdown };

Result<Format, std::string> parse_format(std::string_view s);  // "csv" | "jsonl" | "md"

using Cell = std::variant<std::string, long long, double>;

/// Column-ordered table with typed cells; numeric cells export unquoted.
/// Exports are deterministic: identical tables produce identical bytes.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  friend bool operator==(const Table&, const Table&) = default;
};

std::string export_table(const Table& table, Format format);

/// Re-parses CSV produced by export_table, restoring numeric cells.
Table parse_csv_table(std::string_view text, std::string name);

Table top_sites_table(std::span<const web::SiteSummary> summaries);

/// With a blocklist, tallies gain a "category" column (empty when the
/// domain is not listed).
Table domain_tally_table(std::span<const DomainTally> tallies,
                         const trackerdb::DomainBlocklist* blocklist = nullptr);
Table actor_table_to_table(std::span<const email::ActorRow> rows);
Table entity_share_table(std::span<const app::EntityShare> shares);
Table site_summary_table(std::span<const web::SiteSummary> summaries);

struct EntityActorRow {
  std::string entity;
  std::vector<std::string> sources;
};

/// Actor domains grouped by owning entity. Rows sorted by source count
/// descending, then entity name.
std::vector<EntityActorRow> entity_rollup(std::span<const email::ActorRow> rows,
                                          const trackerdb::EntityMap& entities);

Table entity_actor_table(std::span<const EntityActorRow> rows);

}  // namespace trackaudit::report
