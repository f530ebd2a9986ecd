#include <doctest.h>

#include <httplib.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <thread>

#include "trackaudit/fetch.hpp"

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

// In-process page server; one instance per test case.
class FixtureServer {
 public:
  FixtureServer() {
    server_.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Set-Cookie", "session=abc123; Path=/");
      res.set_content(
          "<html><body>"
          "<img src=\"http://127.0.0.1:1/self.png\">"
          "<p>hello</p></body></html>",
          "text/html");
    });
    server_.Get("/start", [this](const httplib::Request&, httplib::Response& res) {
      res.set_header("Set-Cookie", "hop=first; Path=/");
      res.set_redirect("/landing", 302);
    });
    server_.Get("/landing", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Set-Cookie", "track=xyz; Domain=tracker.example; Path=/");
      res.set_content("<html><body><img src=\"https://pix.tracker.example/i.gif\" "
                      "width=\"1\" height=\"1\"></body></html>",
                      "text/html");
    });
    server_.Get("/missing", [](const httplib::Request&, httplib::Response& res) {
      res.status = 404;
      res.set_content("gone", "text/plain");
    });
    server_.Get("/loop", [](const httplib::Request&, httplib::Response& res) {
      res.set_redirect("/loop", 302);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FixtureServer() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("static fetch records header cookies and loaded resources") {
  FixtureServer server;
  auto session = fetch::static_fetch(server.url("/"), psl());
  REQUIRE(session.ok());
  const auto& s = session.value();
  CHECK(s.phase == web::Phase::PreConsent);
  REQUIRE(s.cookies.size() == 1);
  CHECK(s.cookies[0].name == "session");
  CHECK(s.cookies[0].party == web::Party::First);  // host-only on 127.0.0.1
  CHECK(s.cookies[0].value_hash.size() == 16);
  REQUIRE(s.requests.size() == 1);
  CHECK(s.requests[0].host == "127.0.0.1");
  CHECK(s.requests[0].party == web::Party::First);
  CHECK(s.requests[0].kind == web::ResourceKind::Image);
}

TEST_CASE("redirect chain: cookies from every hop, third-party domain flagged") {
  FixtureServer server;
  auto session = fetch::static_fetch(server.url("/start"), psl());
  REQUIRE(session.ok());
  const auto& s = session.value();
  REQUIRE(s.cookies.size() == 2);
  CHECK(s.cookies[0].name == "hop");
  CHECK(s.cookies[0].party == web::Party::First);
  CHECK(s.cookies[1].name == "track");
  CHECK(s.cookies[1].cookie_domain == "tracker.example");
  CHECK(s.cookies[1].party == web::Party::Third);
  REQUIRE(s.requests.size() == 1);
  CHECK(s.requests[0].party == web::Party::Third);
}

TEST_CASE("http error statuses are per-site errors") {
  FixtureServer server;
  auto session = fetch::static_fetch(server.url("/missing"), psl());
  REQUIRE_FALSE(session.ok());
  CHECK(session.error().kind == fetch::FetchErrorKind::HttpError);
  CHECK(session.error().status == 404);
}

TEST_CASE("redirect limit is enforced") {
  FixtureServer server;
  fetch::FetchOptions options;
  options.redirect_limit = 3;
  auto session = fetch::static_fetch(server.url("/loop"), psl(), options);
  REQUIRE_FALSE(session.ok());
  CHECK(session.error().kind == fetch::FetchErrorKind::TooManyRedirects);
}

TEST_CASE("dns failure is detected and named") {
  auto session = fetch::static_fetch("http://no-such-host.invalid/", psl());
  REQUIRE_FALSE(session.ok());
  CHECK(session.error().kind == fetch::FetchErrorKind::DnsFailure);
}

TEST_CASE("connection refused is a connection failure") {
  // Grab a free port without listening, then release it; nothing serves there.
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  REQUIRE(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
  socklen_t len = sizeof(addr);
  REQUIRE(::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
  int dead_port = ntohs(addr.sin_port);
  ::close(fd);

  fetch::FetchOptions options;
  options.timeout = std::chrono::seconds(5);
  auto session = fetch::static_fetch("http://127.0.0.1:" + std::to_string(dead_port) + "/", psl(),
                                     options);
  REQUIRE_FALSE(session.ok());
  CHECK(session.error().kind == fetch::FetchErrorKind::ConnectionFailure);
}

TEST_CASE("non-http urls are rejected up front") {
  CHECK_FALSE(fetch::static_fetch("ftp://files.example.com/x", psl()).ok());
  CHECK_FALSE(fetch::static_fetch("not a url", psl()).ok());
}
