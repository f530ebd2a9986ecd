#include <doctest.h>

#include "trackaudit/tracker_db.hpp"

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

}  // namespace

TEST_CASE("entity map attributions match the shipped snapshot") {
  auto map = trackerdb::EntityMap::load(test_support::data_dir() / "entity_map.csv");
  REQUIRE(map.ok());
  const auto& entities = map.value();
  CHECK(entities.attribute("doubleclick.net") == "Google");
  CHECK(entities.attribute("googleapis.com") == "Google");
  CHECK(entities.attribute("fonts.googleapis.com") == "Google");  // subdomain
  CHECK(entities.attribute("xiti.com") == "Xiti");
  CHECK(entities.attribute("logc279.xiti.com") == "Xiti");
  CHECK(entities.attribute("iroquois.fr") == "Iroquois");
  CHECK(entities.attribute("facebook.com") == "Facebook");
  CHECK(entities.attribute("unlisted.example") == "Autres");
}

TEST_CASE("entity map matches package prefixes and name prefixes") {
  auto map = trackerdb::EntityMap::parse(
      "com.google.,Google\ndoubleclick.net,Google\nAppCenter,Microsoft\n");
  REQUIRE(map.ok());
  const auto& entities = map.value();
  CHECK(entities.attribute("com.google.firebase.analytics.FirebaseAnalytics") == "Google");
  CHECK(entities.attribute("AppCenter Crashes") == "Microsoft");
  CHECK(entities.attribute("AppCenter") == "Microsoft");
  CHECK(entities.attribute("AppCenterX") == "Autres");        // word boundary
  CHECK(entities.attribute("notdoubleclick.net") == "Autres");  // label boundary
  CHECK(entities.attribute("sub.doubleclick.net") == "Google");
}

TEST_CASE("entity map rejects duplicates and bad patterns") {
  auto dup = trackerdb::EntityMap::parse("xiti.com,Xiti\nxiti.com,Other\n");
  REQUIRE_FALSE(dup.ok());
  CHECK(dup.error().kind == trackerdb::LoadErrorKind::DuplicatePattern);

  auto bad = trackerdb::EntityMap::parse("bad..pattern,X\n");
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.error().kind == trackerdb::LoadErrorKind::BadPattern);

  auto empty_entity = trackerdb::EntityMap::parse("xiti.com,\n");
  REQUIRE_FALSE(empty_entity.ok());

  auto no_comma = trackerdb::EntityMap::parse("just-a-pattern\n");
  REQUIRE_FALSE(no_comma.ok());
  CHECK(no_comma.error().kind == trackerdb::LoadErrorKind::BadFormat);
}

TEST_CASE("empty entity map only has the fallback") {
  auto map = trackerdb::EntityMap::parse("# nothing here\n");
  REQUIRE(map.ok());
  CHECK(map.value().rule_count() == 0);
  CHECK(map.value().attribute("anything.fr") == "Autres");
}

TEST_CASE("attribute is insensitive to non-overlapping rule order") {
  auto a = trackerdb::EntityMap::parse("xiti.com,Xiti\nfacebook.com,Facebook\ngoogle.com,Google\n");
  auto b = trackerdb::EntityMap::parse("google.com,Google\nxiti.com,Xiti\nfacebook.com,Facebook\n");
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  for (std::string_view key : {"xiti.com", "facebook.com", "google.com", "sub.google.com",
                               "other.net"}) {
    CHECK(a.value().attribute(key) == b.value().attribute(key));
  }
}

TEST_CASE("reloading the same file yields identical lookups") {
  auto first = trackerdb::EntityMap::load(test_support::data_dir() / "entity_map.csv");
  auto second = trackerdb::EntityMap::load(test_support::data_dir() / "entity_map.csv");
  REQUIRE(first.ok());
  REQUIRE(second.ok());
  CHECK(first.value().rule_count() == second.value().rule_count());
  for (std::string_view key :
       {"doubleclick.net", "xiti.com", "com.google.x.Y", "Google Analytics", "nobody.example"}) {
    CHECK(first.value().attribute(key) == second.value().attribute(key));
  }
}

TEST_CASE("blocklist loads categories and defaults to Other") {
  auto list = trackerdb::DomainBlocklist::load(test_support::data_dir() / "blocklist.txt", psl());
  REQUIRE(list.ok());
  CHECK(list.value().lookup(RegistrableDomain{"xiti.com"}) == trackerdb::Category::Analytics);
  CHECK(list.value().lookup(RegistrableDomain{"doubleclick.net"}) ==
        trackerdb::Category::Advertising);
  CHECK(list.value().lookup(RegistrableDomain{"facebook.com"}) == trackerdb::Category::Social);
  CHECK_FALSE(list.value().lookup(RegistrableDomain{"ameli.fr"}).has_value());

  auto bad = trackerdb::DomainBlocklist::load(test_support::data_dir() / "missing.txt", psl());
  CHECK_FALSE(bad.ok());
}

TEST_CASE("signature loading: pipe strings, arrays, and validation") {
  auto shipped = trackerdb::load_signatures(test_support::data_dir() / "tracker_signatures.json");
  REQUIRE(shipped.ok());
  CHECK(shipped.value().size() == 25);

  auto parsed = trackerdb::parse_signatures(R"([
    {"name": "A", "code_signature": "com\\.a\\.sdk.|com.a.core.", "owner": "A Corp"},
    {"name": "B", "code_signature": ["com.b."], "network_signature": ["b.example"]}
  ])");
  REQUIRE(parsed.ok());
  CHECK(parsed.value()[0].code_prefixes ==
        std::vector<std::string>{"com.a.sdk.", "com.a.core."});
  CHECK(parsed.value()[1].network_hosts == std::vector<std::string>{"b.example"});

  auto no_patterns = trackerdb::parse_signatures(R"([{"name": "X"}])");
  REQUIRE_FALSE(no_patterns.ok());
  CHECK(no_patterns.error().kind == trackerdb::LoadErrorKind::BadPattern);

  auto bad_prefix = trackerdb::parse_signatures(
      R"([{"name": "X", "code_signature": "com..broken."}])");
  REQUIRE_FALSE(bad_prefix.ok());

  auto not_array = trackerdb::parse_signatures(R"({"name": "X"})");
  REQUIRE_FALSE(not_array.ok());
  CHECK(not_array.error().kind == trackerdb::LoadErrorKind::BadFormat);
}
