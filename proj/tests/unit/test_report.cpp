#include <doctest.h>

#include <algorithm>
#include <random>

#include "trackaudit/report.hpp"

#include "../support/paths.hpp"

using namespace trackaudit;

namespace {

const PublicSuffixList& psl() {
  static PublicSuffixList list = [] {
    auto loaded = PublicSuffixList::load(test_support::data_dir() / "public_suffix_list.dat");
    REQUIRE(loaded.ok());
    return std::move(loaded.value());
  }();
  return list;
}

web::SiteSummary summary_of(std::string site, int third_cookies) {
  web::SiteSummary s;
  s.site = std::move(site);
  s.third_cookies_pre = third_cookies;
  return s;
}

// Builds a session carrying `n` third-party cookies for `domain` observed on
// a neutral site, or first-party cookies when the site is the domain itself.
web::CaptureSession session_with_cookies(const std::string& site_domain,
                                         const std::string& cookie_domain, int n, int salt) {
  web::CaptureSession session;
  session.site = "https://" + site_domain + "/";
  session.site_domain = RegistrableDomain{site_domain};
  for (int i = 0; i < n; ++i) {
    web::CookieRecord c;
    c.name = "c" + std::to_string(salt) + "_" + std::to_string(i);
    c.cookie_domain = "." + cookie_domain;
    c.value_hash = "00";
    c.party = web::classify_party(c.cookie_domain, session.site_domain, psl());
    session.cookies.push_back(std::move(c));
  }
  return session;
}

web::CaptureSession session_with_requests(const std::string& site_domain,
                                          const std::string& request_host, int n) {
  web::CaptureSession session;
  session.site = "https://" + site_domain + "/";
  session.site_domain = RegistrableDomain{site_domain};
  for (int i = 0; i < n; ++i) {
    web::RequestRecord r;
    r.host = request_host;
    r.kind = web::ResourceKind::Script;
    r.party = web::classify_party(r.host, session.site_domain, psl());
    session.requests.push_back(std::move(r));
  }
  return session;
}

}  // namespace

TEST_CASE("top sites ranking with alphabetical tie break") {
  std::vector<web::SiteSummary> summaries = {
      summary_of("www.savoie.cci.fr", 14),
      summary_of("mjc76lillebonne.over-blog.com", 18),
      summary_of("cucugnan.fr", 33),
      summary_of("gresse-en-vercors.fr", 29),
      summary_of("laposte.fr", 32),
      summary_of("lesgauloisdeclemencey.over-blog.com", 18),
  };
  auto top = report::top_sites_by_third_cookies(summaries, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].site == "cucugnan.fr");
  CHECK(top[1].site == "laposte.fr");
  CHECK(top[2].site == "gresse-en-vercors.fr");

  auto all = report::top_sites_by_third_cookies(summaries, 100);  // n beyond size
  REQUIRE(all.size() == summaries.size());
  CHECK(all[3].site == "lesgauloisdeclemencey.over-blog.com");  // 18-18 tie: l < m
  CHECK(all[4].site == "mjc76lillebonne.over-blog.com");
}

TEST_CASE("top sites matches brute-force sort on random input") {
  std::mt19937 rng(2468);
  std::uniform_int_distribution<int> count_pick(0, 40);
  for (int round = 0; round < 200; ++round) {
    std::vector<web::SiteSummary> summaries;
    for (int i = 0; i < 12; ++i) {
      summaries.push_back(summary_of("site" + std::to_string(i) + ".fr", count_pick(rng)));
    }
    auto expected = summaries;
    std::sort(expected.begin(), expected.end(),
              [](const web::SiteSummary& a, const web::SiteSummary& b) {
                if (a.third_cookies_pre != b.third_cookies_pre) {
                  return a.third_cookies_pre > b.third_cookies_pre;
                }
                return a.site < b.site;
              });
    expected.resize(5);
    auto got = report::top_sites_by_third_cookies(summaries, 5);
    REQUIRE(got.size() == 5);
    for (size_t i = 0; i < 5; ++i) CHECK(got[i].site == expected[i].site);
  }
}

TEST_CASE("domain tallies count cookies by party and third requests") {
  std::vector<web::CaptureSession> sessions;
  sessions.push_back(session_with_cookies("google.com", "google.com", 3, 0));   // first-party
  sessions.push_back(session_with_cookies("cucugnan.fr", "google.com", 2, 1));  // third-party
  sessions.push_back(session_with_requests("cucugnan.fr", "www.google.com", 4));

  auto tallies = report::domain_tallies(sessions, psl());
  REQUIRE(tallies.size() == 1);
  CHECK(tallies[0].domain == "google.com");
  CHECK(tallies[0].first_cookies == 3);
  CHECK(tallies[0].third_cookies == 2);
  CHECK(tallies[0].third_requests == 4);
}

TEST_CASE("domain tallies: no sessions yields empty") {
  CHECK(report::domain_tallies({}, psl()).empty());
}

TEST_CASE("aggregation is order-insensitive (property)") {
  std::mt19937 rng(1123);
  std::uniform_int_distribution<int> count_pick(0, 6);
  const std::vector<std::string> cookie_domains = {"google.com", "doubleclick.net", "xiti.com"};
  const std::vector<std::string> sites = {"cucugnan.fr", "laposte.fr", "google.com"};

  for (int round = 0; round < 200; ++round) {
    std::vector<web::CaptureSession> sessions;
    int salt = 0;
    for (const auto& site : sites) {
      for (const auto& domain : cookie_domains) {
        int n = count_pick(rng);
        if (n > 0) sessions.push_back(session_with_cookies(site, domain, n, salt++));
        int m = count_pick(rng);
        if (m > 0) sessions.push_back(session_with_requests(site, "r." + domain, m));
      }
    }
    auto baseline = report::domain_tallies(sessions, psl());
    std::shuffle(sessions.begin(), sessions.end(), rng);
    auto shuffled = report::domain_tallies(sessions, psl());
    CHECK(baseline == shuffled);
  }
}

TEST_CASE("tally totals equal the sum over per-session deduped third cookies") {
  std::vector<web::CaptureSession> sessions;
  sessions.push_back(session_with_cookies("cucugnan.fr", "doubleclick.net", 5, 0));
  sessions.push_back(session_with_cookies("laposte.fr", "doubleclick.net", 4, 1));
  // Duplicate cookies inside one session collapse before counting.
  auto dup = session_with_cookies("gresse-en-vercors.fr", "doubleclick.net", 1, 2);
  dup.cookies.push_back(dup.cookies.front());
  sessions.push_back(dup);

  auto tallies = report::domain_tallies(sessions, psl());
  REQUIRE(tallies.size() == 1);
  long long expected = 0;
  for (const auto& session : sessions) {
    for (const auto& cookie : web::dedupe_cookies(session.cookies, psl())) {
      if (cookie.party == web::Party::Third) ++expected;
    }
  }
  CHECK(tallies[0].third_cookies == expected);
  CHECK(tallies[0].third_cookies == 10);
}

TEST_CASE("export: csv header, quoting, and determinism") {
  report::Table table;
  table.name = "actors";
  table.columns = {"actor", "sources"};
  table.rows.push_back({std::string("googleapis.com"), std::string("Crous;Smerra")});
  table.rows.push_back({std::string("we,ird\"domain"), std::string("A")});

  std::string csv = report::export_table(table, report::Format::Csv);
  CHECK(csv.starts_with("actor,sources\n"));
  CHECK(csv.find("\"we,ird\"\"domain\"") != std::string::npos);
  CHECK(csv == report::export_table(table, report::Format::Csv));  // byte-identical
}

TEST_CASE("export: markdown table has the 4-column site shape") {
  std::vector<web::SiteSummary> summaries = {summary_of("cucugnan.fr", 33)};
  summaries[0].third_cookie_domains = {"doubleclick.net", "youtube.com"};
  summaries[0].third_request_domains = {"googleapis.com"};
  auto table = report::top_sites_table(summaries);
  REQUIRE(table.columns.size() == 4);
  std::string md = report::export_table(table, report::Format::Markdown);
  CHECK(md.find("| site | third_cookies | cookie_domains | request_domains |") !=
        std::string::npos);
  CHECK(md.find("| cucugnan.fr | 33 |") != std::string::npos);
}

TEST_CASE("export: jsonl keeps numbers unquoted") {
  report::Table table;
  table.name = "t";
  table.columns = {"domain", "count", "mean"};
  table.rows.push_back({std::string("xiti.com"), static_cast<long long>(40), 3.98});
  std::string jsonl = report::export_table(table, report::Format::Jsonl);
  CHECK(jsonl == "{\"domain\":\"xiti.com\",\"count\":40,\"mean\":3.98}\n");
}

TEST_CASE("csv round trip restores the table structure") {
  report::Table table;
  table.name = "domain_tallies";
  table.columns = {"domain", "first_cookies", "third_cookies", "third_requests"};
  table.rows.push_back({std::string("google.com"), static_cast<long long>(89),
                        static_cast<long long>(281), static_cast<long long>(1435)});
  table.rows.push_back({std::string("doubleclick.net"), static_cast<long long>(64),
                        static_cast<long long>(468), static_cast<long long>(767)});

  std::string csv = report::export_table(table, report::Format::Csv);
  report::Table reparsed = report::parse_csv_table(csv, table.name);
  CHECK(reparsed == table);
  CHECK(report::export_table(reparsed, report::Format::Csv) == csv);
}

TEST_CASE("domain tally table tags blocklisted domains with their category") {
  auto blocklist =
      trackerdb::DomainBlocklist::load(test_support::data_dir() / "blocklist.txt", psl());
  REQUIRE(blocklist.ok());
  std::vector<report::DomainTally> tallies = {
      {"xiti.com", 40, 193, 121},
      {"ameli.fr", 1, 0, 0},
  };
  auto plain = report::domain_tally_table(tallies);
  CHECK(plain.columns.size() == 4);

  auto tagged = report::domain_tally_table(tallies, &blocklist.value());
  REQUIRE(tagged.columns.size() == 5);
  CHECK(tagged.columns[4] == "category");
  CHECK(std::get<std::string>(tagged.rows[0][4]) == "Analytics");
  CHECK(std::get<std::string>(tagged.rows[1][4]).empty());
}

TEST_CASE("unsupported format string is rejected") {
  CHECK_FALSE(report::parse_format("xml").ok());
  CHECK(report::parse_format("csv").ok());
  CHECK(report::parse_format("JSONL").ok());
  CHECK(report::parse_format("md").ok());
}

TEST_CASE("entity rollup groups actor domains by owner") {
  auto entities = trackerdb::EntityMap::load(test_support::data_dir() / "entity_map.csv");
  REQUIRE(entities.ok());
  std::vector<email::ActorRow> actors = {
      {"googleapis.com", {"Crous", "Smerra"}},
      {"google-analytics.com", {"DIRCOM"}},
      {"xiti.com", {"Ameli"}},
      {"iroquois.fr", {"Crous"}},
      {"nmp1.com", {"Smerra"}},
  };
  auto rollup = report::entity_rollup(actors, entities.value());
  auto find = [&](std::string_view entity) -> const report::EntityActorRow* {
    for (const auto& row : rollup) {
      if (row.entity == entity) return &row;
    }
    return nullptr;
  };
  REQUIRE(find("Google") != nullptr);
  CHECK(find("Google")->sources == std::vector<std::string>{"Crous", "DIRCOM", "Smerra"});
  REQUIRE(find("Xiti") != nullptr);
  CHECK(find("Xiti")->sources == std::vector<std::string>{"Ameli"});
  REQUIRE(find("Iroquois") != nullptr);
  CHECK(find("Iroquois")->sources == std::vector<std::string>{"Crous"});
  REQUIRE(find("Autres") != nullptr);
  CHECK(find("Autres")->sources == std::vector<std::string>{"Smerra"});
}
