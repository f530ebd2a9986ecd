#include "trackaudit/report.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "trackaudit/csv.hpp"
#include "trackaudit/strings.hpp"

namespace trackaudit::report {

namespace {

std::string cell_to_string(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return strings::format_double2(std::get<double>(cell));
}

bool looks_like_integer(std::string_view s) {
  if (s.empty() || s.size() > 18) return false;
  size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  if (s[i] == '0' && s.size() > i + 1) return false;  // "007" stays a string
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

bool looks_like_double2(std::string_view s) {
  // The fixed "%.2f" shape used by exports.
  size_t dot = s.find('.');
  if (dot == std::string_view::npos || s.size() - dot != 3) return false;
  size_t i = (s[0] == '-') ? 1 : 0;
  if (i == dot) return false;
  for (size_t j = i; j < s.size(); ++j) {
    if (j == dot) continue;
    if (s[j] < '0' || s[j] > '9') return false;
  }
  return true;
}

std::string join_semicolon(const std::vector<std::string>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(';');
    out += values[i];
  }
  return out;
}

}  // namespace

std::vector<DomainTally> domain_tallies(std::span<const web::CaptureSession> sessions,
                                        const PublicSuffixList& psl) {
  std::map<std::string, DomainTally> by_domain;
  auto slot = [&](const std::string& domain) -> DomainTally& {
    auto [it, inserted] = by_domain.try_emplace(domain);
    if (inserted) it->second.domain = domain;
    return it->second;
  };

  for (const auto& session : sessions) {
    for (const auto& cookie : web::dedupe_cookies(session.cookies, psl)) {
      std::string host = cookie.cookie_domain;
      while (!host.empty() && host.front() == '.') host.erase(host.begin());
      auto resolved = registrable_domain(host, psl);
      std::string key = resolved.ok() ? resolved.value().domain.value : strings::to_lower(host);
      if (key.empty()) continue;
      if (cookie.party == web::Party::First) {
        ++slot(key).first_cookies;
      } else {
        ++slot(key).third_cookies;
      }
    }
    for (const auto& request : session.requests) {
      if (request.party != web::Party::Third) continue;
      auto resolved = registrable_domain(request.host, psl);
      std::string key =
          resolved.ok() ? resolved.value().domain.value : strings::to_lower(request.host);
      if (key.empty()) continue;
      ++slot(key).third_requests;
    }
  }

  std::vector<DomainTally> out;
  out.reserve(by_domain.size());
  for (auto& [_, tally] : by_domain) out.push_back(std::move(tally));
  std::sort(out.begin(), out.end(), [](const DomainTally& a, const DomainTally& b) {
    if (a.total() != b.total()) return a.total() > b.total();
    return a.domain < b.domain;
  });
  return out;
}

std::vector<web::SiteSummary> top_sites_by_third_cookies(std::vector<web::SiteSummary> summaries,
                                                         size_t n) {
  std::sort(summaries.begin(), summaries.end(),
            [](const web::SiteSummary& a, const web::SiteSummary& b) {
              int ka = a.ranking_third_cookies();
              int kb = b.ranking_third_cookies();
              if (ka != kb) return ka > kb;
              return a.site < b.site;
            });
  if (summaries.size() > n) summaries.resize(n);
  return summaries;
}

Result<Format, std::string> parse_format(std::string_view s) {
  if (strings::iequals(s, "csv")) return Format::Csv;
  if (strings::iequals(s, "jsonl")) return Format::Jsonl;
  if (strings::iequals(s, "md") || strings::iequals(s, "markdown")) return Format::Markdown;
  return "UnsupportedFormat: '" + std::string(s) + "' (expected csv, jsonl, or md)";
}

std::string export_table(const Table& table, Format format) {
  std::string out;
  switch (format) {
    case Format::Csv: {
      std::vector<std::string> header(table.columns.begin(), table.columns.end());
      out += csv::join_row(header);
      out.push_back('\n');
      for (const auto& row : table.rows) {
        std::vector<std::string> fields;
        fields.reserve(row.size());
        for (const auto& cell : row) fields.push_back(cell_to_string(cell));
        out += csv::join_row(fields);
        out.push_back('\n');
      }
      break;
    }
    case Format::Jsonl: {
      for (const auto& row : table.rows) {
        nlohmann::ordered_json j;
        for (size_t i = 0; i < table.columns.size() && i < row.size(); ++i) {
          const Cell& cell = row[i];
          if (const auto* s = std::get_if<std::string>(&cell)) {
            j[table.columns[i]] = *s;
          } else if (const auto* v = std::get_if<long long>(&cell)) {
            j[table.columns[i]] = *v;
          } else {
            j[table.columns[i]] = std::get<double>(cell);
          }
        }
        out += j.dump();
        out.push_back('\n');
      }
      break;
    }
    case Format::Markdown: {
      out += "|";
      for (const auto& col : table.columns) out += " " + col + " |";
      out += "\n|";
      for (size_t i = 0; i < table.columns.size(); ++i) out += " --- |";
      out.push_back('\n');
      for (const auto& row : table.rows) {
        out += "|";
        for (const auto& cell : row) {
          std::string text = cell_to_string(cell);
          // Pipes would break the table geometry.
          std::string safe;
          for (char c : text) {
            if (c == '|') safe += "\\|";
            else safe.push_back(c);
          }
          out += " " + safe + " |";
        }
        out.push_back('\n');
      }
      break;
    }
  }
  return out;
}

Table parse_csv_table(std::string_view text, std::string name) {
  Table table;
  table.name = std::move(name);
  auto rows = csv::parse(text);
  if (rows.empty()) return table;
  table.columns = rows[0];
  for (size_t r = 1; r < rows.size(); ++r) {
    std::vector<Cell> row;
    row.reserve(rows[r].size());
    for (auto& field : rows[r]) {
      if (looks_like_integer(field)) {
        row.emplace_back(static_cast<long long>(std::strtoll(field.c_str(), nullptr, 10)));
      } else if (looks_like_double2(field)) {
        row.emplace_back(std::strtod(field.c_str(), nullptr));
      } else {
        row.emplace_back(std::move(field));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table top_sites_table(std::span<const web::SiteSummary> summaries) {
  Table table;
  table.name = "top_sites";
  table.columns = {"site", "third_cookies", "cookie_domains", "request_domains"};
  for (const auto& s : summaries) {
    table.rows.push_back({s.site, static_cast<long long>(s.ranking_third_cookies()),
                          join_semicolon(s.third_cookie_domains),
                          join_semicolon(s.third_request_domains)});
  }
  return table;
}

Table domain_tally_table(std::span<const DomainTally> tallies,
                         const trackerdb::DomainBlocklist* blocklist) {
  Table table;
  table.name = "domain_tallies";
  table.columns = {"domain", "first_cookies", "third_cookies", "third_requests"};
  if (blocklist != nullptr) table.columns.push_back("category");
  for (const auto& t : tallies) {
    std::vector<Cell> row = {t.domain, t.first_cookies, t.third_cookies, t.third_requests};
    if (blocklist != nullptr) {
      auto category = blocklist->lookup(RegistrableDomain{t.domain});
      row.emplace_back(category ? std::string(trackerdb::to_string(*category)) : std::string());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table actor_table_to_table(std::span<const email::ActorRow> rows) {
  Table table;
  table.name = "actors";
  table.columns = {"actor", "sources"};
  for (const auto& row : rows) {
    table.rows.push_back({row.actor, join_semicolon(row.sources)});
  }
  return table;
}

Table entity_share_table(std::span<const app::EntityShare> shares) {
  Table table;
  table.name = "entities";
  table.columns = {"entity", "occurrences", "percent"};
  for (const auto& share : shares) {
    table.rows.push_back(
        {share.entity, share.occurrences, static_cast<long long>(share.percent)});
  }
  return table;
}

Table site_summary_table(std::span<const web::SiteSummary> summaries) {
  Table table;
  table.name = "summary";
  table.columns = {"site",
                   "site_domain",
                   "first_cookies_pre",
                   "third_cookies_pre",
                   "third_requests_pre",
                   "first_cookies_post",
                   "third_cookies_post",
                   "third_requests_post",
                   "delta_third_cookies",
                   "third_party_domains"};
  for (const auto& s : summaries) {
    std::vector<std::string> domains = s.third_cookie_domains;
    domains.insert(domains.end(), s.third_request_domains.begin(),
                   s.third_request_domains.end());
    std::sort(domains.begin(), domains.end());
    domains.erase(std::unique(domains.begin(), domains.end()), domains.end());
    table.rows.push_back({s.site, s.site_domain, static_cast<long long>(s.first_cookies_pre),
                          static_cast<long long>(s.third_cookies_pre),
                          static_cast<long long>(s.third_requests_pre),
                          s.has_post ? Cell(static_cast<long long>(s.first_cookies_post)) : Cell(std::string()),
                          s.has_post ? Cell(static_cast<long long>(s.third_cookies_post)) : Cell(std::string()),
                          s.has_post ? Cell(static_cast<long long>(s.third_requests_post)) : Cell(std::string()),
                          s.has_post ? Cell(static_cast<long long>(s.delta_third_cookies)) : Cell(std::string()),
                          join_semicolon(domains)});
  }
  return table;
}

std::vector<EntityActorRow> entity_rollup(std::span<const email::ActorRow> rows,
                                          const trackerdb::EntityMap& entities) {
  std::map<std::string, std::set<std::string>> sources_by_entity;
  for (const auto& row : rows) {
    std::string entity = entities.attribute(row.actor);
    auto& sources = sources_by_entity[entity];
    sources.insert(row.sources.begin(), row.sources.end());
  }
  std::vector<EntityActorRow> out;
  out.reserve(sources_by_entity.size());
  for (auto& [entity, sources] : sources_by_entity) {
    out.push_back({entity, {sources.begin(), sources.end()}});
  }
  std::sort(out.begin(), out.end(), [](const EntityActorRow& a, const EntityActorRow& b) {
    if (a.sources.size() != b.sources.size()) return a.sources.size() > b.sources.size();
    return a.entity < b.entity;
  });
  return out;
}

Table entity_actor_table(std::span<const EntityActorRow> rows) {
  Table table;
  table.name = "actor_entities";
  table.columns = {"entity", "sources"};
  for (const auto& row : rows) {
    table.rows.push_back({row.entity, join_semicolon(row.sources)});
  }
  return table;
}

}  // namespace trackaudit::report
