#include <doctest.h>

#include <random>

#include "trackaudit/domain.hpp"

#include "../support/paths.hpp"
#include "../support/psl_oracle.hpp"

using namespace trackaudit;

namespace {

const PublicSuffixList& shipped_psl() {
  static PublicSuffixList psl = [] {
    auto loaded = PublicSuffixList::load(test_support::data_dir() / "public_suffix_list.dat");
    REQUIRE(loaded.ok());
    return std::move(loaded.value());
  }();
  return psl;
}

std::string reg(std::string_view host) {
  auto result = registrable_domain(host, shipped_psl());
  REQUIRE(result.ok());
  return result.value().domain.value;
}

}  // namespace

TEST_CASE("registrable domain of basic hosts") {
  CHECK(reg("example.com") == "example.com");
  CHECK(reg("stats.info.ameli.fr") == "ameli.fr");
  CHECK(reg("oups.gouv.fr") == "oups.gouv.fr");  // gouv.fr is a public suffix
  CHECK(reg("www.impots.gouv.fr") == "impots.gouv.fr");
  CHECK(reg("pubads.g.doubleclick.net") == "doubleclick.net");
  CHECK(reg("fonts.googleapis.com") == "googleapis.com");
  CHECK(reg("www.oui.sncf") == "oui.sncf");  // brand TLD
}

TEST_CASE("case folding and trailing dots") {
  CHECK(reg("WWW.Impots.GOUV.FR.") == "impots.gouv.fr");
  CHECK(reg("  ameli.fr ") == "ameli.fr");
}

TEST_CASE("wildcard and exception rules") {
  CHECK(reg("foo.bar.ck") == "foo.bar.ck");  // *.ck makes bar.ck a suffix
  CHECK(reg("www.ck") == "www.ck");          // !www.ck exception
  auto bare = registrable_domain("bar.ck", shipped_psl());
  REQUIRE(bare.ok());
  CHECK_FALSE(bare.value().registrable);  // bar.ck is itself a public suffix
  CHECK(reg("city.kawasaki.jp") == "city.kawasaki.jp");
  CHECK(reg("x.city.kawasaki.jp") == "city.kawasaki.jp");
  CHECK(reg("a.b.other.kawasaki.jp") == "b.other.kawasaki.jp");
}

TEST_CASE("unknown TLD falls back to the implicit rule") {
  CHECK(reg("example.unknowntld") == "example.unknowntld");
  CHECK(reg("deep.example.unknowntld") == "example.unknowntld");
}

TEST_CASE("hosts that are themselves suffixes are flagged non-registrable") {
  for (std::string_view host : {"gouv.fr", "com", "co.uk", "github.io"}) {
    auto result = registrable_domain(host, shipped_psl());
    REQUIRE(result.ok());
    CHECK_FALSE(result.value().registrable);
    CHECK(result.value().domain.value == host);
  }
}

TEST_CASE("ip literals are returned verbatim and flagged") {
  auto v4 = registrable_domain("127.0.0.1", shipped_psl());
  REQUIRE(v4.ok());
  CHECK(v4.value().ip_literal);
  CHECK_FALSE(v4.value().registrable);
  CHECK(v4.value().domain.value == "127.0.0.1");

  auto v6 = registrable_domain("[::1]", shipped_psl());
  REQUIRE(v6.ok());
  CHECK(v6.value().ip_literal);
  CHECK(v6.value().domain.value == "::1");

  // 300 in an octet is not an IPv4 literal; falls back to hostname rules.
  auto not_ip = registrable_domain("300.1.2.3", shipped_psl());
  REQUIRE(not_ip.ok());
  CHECK_FALSE(not_ip.value().ip_literal);
}

TEST_CASE("host errors") {
  CHECK_FALSE(registrable_domain("", shipped_psl()).ok());
  CHECK_FALSE(registrable_domain(".", shipped_psl()).ok());
  CHECK_FALSE(registrable_domain("bad..host", shipped_psl()).ok());
  CHECK_FALSE(registrable_domain("white space.fr", shipped_psl()).ok());
  CHECK_FALSE(registrable_domain("mailto:someone@x.fr", shipped_psl()).ok());
  auto err = registrable_domain("", shipped_psl());
  CHECK(err.error() == HostError::EmptyHost);
}

TEST_CASE("idempotence: registrable_domain is a fixpoint") {
  for (std::string_view host :
       {"stats.info.ameli.fr", "a.b.c.example.com", "www.gouv.fr", "x.co.uk"}) {
    std::string once = reg(host);
    CHECK(reg(once) == once);
  }
}

TEST_CASE("url parsing") {
  auto url = parse_url("https://user@www.Impots.GOUV.fr:8443/espace?p=1#frag");
  REQUIRE(url.ok());
  CHECK(url.value().scheme == "https");
  CHECK(url.value().host == "www.impots.gouv.fr");
  CHECK(url.value().port == "8443");
  CHECK(url.value().rest == "/espace?p=1#frag");

  auto bare = parse_url("//cdn.example.com/x.png");
  REQUIRE(bare.ok());
  CHECK(bare.value().scheme.empty());
  CHECK(bare.value().host == "cdn.example.com");

  CHECK_FALSE(parse_url("mailto:x@y.fr").ok());
  CHECK_FALSE(parse_url("tel:+33123456789").ok());
  CHECK_FALSE(parse_url("cid:image001").ok());
  CHECK_FALSE(parse_url("relative/path.png").ok());
  CHECK_FALSE(parse_url("/rooted/path.png").ok());
  CHECK_FALSE(parse_url("").ok());
}

TEST_CASE("classify_origin follows the domain/allowlist rules") {
  Allowlist allow;  // default: w3.org
  RegistrableDomain sender{"impots.gouv.fr"};

  auto internal = classify_origin("https://www.impots.gouv.fr/x", sender, allow, shipped_psl());
  REQUIRE(internal.ok());
  CHECK(internal.value().kind == OriginKind::Internal);

  auto external = classify_origin("http://oups.gouv.fr/", sender, allow, shipped_psl());
  REQUIRE(external.ok());
  CHECK(external.value().kind == OriginKind::External);
  CHECK(external.value().host_domain.domain.value == "oups.gouv.fr");

  auto allowlisted = classify_origin("http://www.w3.org/1999/xhtml", sender, allow, shipped_psl());
  REQUIRE(allowlisted.ok());
  CHECK(allowlisted.value().kind == OriginKind::Allowlisted);
}

TEST_CASE("internal beats allowlisted; ip literals are external") {
  Allowlist allow;
  allow.add(RegistrableDomain{"ameli.fr"});
  auto self = classify_origin("https://www.ameli.fr/", RegistrableDomain{"ameli.fr"}, allow,
                              shipped_psl());
  REQUIRE(self.ok());
  CHECK(self.value().kind == OriginKind::Internal);

  auto ip = classify_origin("http://127.0.0.1/x", RegistrableDomain{"ameli.fr"}, allow,
                            shipped_psl());
  REQUIRE(ip.ok());
  CHECK(ip.value().kind == OriginKind::External);
  CHECK(ip.value().host_domain.ip_literal);
}

TEST_CASE("allowlist file loading") {
  auto allow = Allowlist::load(test_support::data_dir() / "allowlist.txt", shipped_psl());
  REQUIRE(allow.ok());
  CHECK(allow.value().contains(RegistrableDomain{"w3.org"}));
}

TEST_CASE("psl matches the reference oracle over random hosts") {
  std::string psl_text = test_support::slurp(test_support::data_dir() / "public_suffix_list.dat");
  auto rules = psl_oracle::parse_rules(psl_text);
  REQUIRE(rules.size() > 20);

  const std::vector<std::string> bases = {
      "fr",       "gouv.fr",        "com",   "co.uk",  "uk",        "kawasaki.jp",
      "city.kawasaki.jp", "foo.ck", "www.ck", "unknowntld", "github.io", "blogspot.com",
      "sncf",     "org",            "asso.fr"};
  const std::vector<std::string> words = {"alpha", "beta", "stats", "www", "cdn", "x9", "info"};

  std::mt19937 rng(20210427);
  std::uniform_int_distribution<size_t> base_pick(0, bases.size() - 1);
  std::uniform_int_distribution<size_t> word_pick(0, words.size() - 1);
  std::uniform_int_distribution<int> depth_pick(0, 3);

  int compared = 0;
  for (int i = 0; i < 500; ++i) {
    std::string host = bases[base_pick(rng)];
    int depth = depth_pick(rng);
    for (int d = 0; d < depth; ++d) host = words[word_pick(rng)] + "." + host;

    std::string expected = psl_oracle::registrable(host, rules);
    auto actual = registrable_domain(host, shipped_psl());
    REQUIRE(actual.ok());
    if (expected.empty()) {
      CHECK_FALSE(actual.value().registrable);
    } else {
      CHECK(actual.value().registrable);
      CHECK(actual.value().domain.value == expected);
    }
    ++compared;
  }
  CHECK(compared == 500);
}

TEST_CASE("classify_origin ignores paths and queries") {
  Allowlist allow;
  RegistrableDomain sender{"ameli.fr"};
  std::mt19937 rng(99);
  const std::vector<std::string> hosts = {"extra1.ameli.fr", "logc279.xiti.com", "www.w3.org"};
  std::uniform_int_distribution<size_t> host_pick(0, hosts.size() - 1);
  std::uniform_int_distribution<int> char_pick('a', 'z');

  for (int i = 0; i < 200; ++i) {
    const std::string& host = hosts[host_pick(rng)];
    std::string base = "https://" + host + "/";
    std::string path;
    for (int j = 0; j < 12; ++j) path.push_back(static_cast<char>(char_pick(rng)));
    std::string with_path = base + path + "?q=" + path + "#f" + path;

    auto lhs = classify_origin(base, sender, allow, shipped_psl());
    auto rhs = classify_origin(with_path, sender, allow, shipped_psl());
    REQUIRE(lhs.ok());
    REQUIRE(rhs.ok());
    CHECK(lhs.value().kind == rhs.value().kind);
  }
}
