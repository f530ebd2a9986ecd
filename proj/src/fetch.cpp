#include "trackaudit/fetch.hpp"

#include <netdb.h>
#include <sys/socket.h>

#include <ctime>

#include <httplib.h>

#include "trackaudit/digest.hpp"
#include "trackaudit/email.hpp"
#include "trackaudit/strings.hpp"

namespace trackaudit::fetch {

namespace {

bool host_resolves(const std::string& host) {
  // IP literals never need resolution.
  addrinfo numeric_hints{};
  numeric_hints.ai_flags = AI_NUMERICHOST;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &numeric_hints, &res) == 0) {
    freeaddrinfo(res);
    return true;
  }
  addrinfo hints{};
  hints.ai_socktype = SOCK_STREAM;
  res = nullptr;
  int rc = getaddrinfo(host.c_str(), nullptr, &hints, &res);
  if (res) freeaddrinfo(res);
  return rc == 0;
}

std::string iso8601_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<long long> parse_cookie_expiry(std::string_view attributes_value, bool is_max_age,
                                             std::time_t now) {
  if (is_max_age) {
    char* end = nullptr;
    std::string s(attributes_value);
    long long seconds = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str()) return std::nullopt;
    return static_cast<long long>(now) + seconds;
  }
  std::tm tm{};
  std::string s(attributes_value);
  if (strptime(s.c_str(), "%a, %d %b %Y %H:%M:%S", &tm) != nullptr) {
    return static_cast<long long>(timegm(&tm));
  }
  return std::nullopt;
}

web::CookieRecord parse_set_cookie(std::string_view header_value, const std::string& request_host,
                                   std::time_t now) {
  web::CookieRecord cookie;
  cookie.cookie_domain = request_host;  // host-only unless a Domain attribute says otherwise
  auto parts = strings::split(header_value, ';');
  for (size_t i = 0; i < parts.size(); ++i) {
    auto part = strings::trim(parts[i]);
    size_t eq = part.find('=');
    std::string_view key = (eq == std::string_view::npos) ? part : strings::trim(part.substr(0, eq));
    std::string_view val = (eq == std::string_view::npos)
                               ? std::string_view{}
                               : strings::trim(part.substr(eq + 1));
    if (i == 0) {
      cookie.name = std::string(key);
      cookie.value_hash = digest_hex(val);
      continue;
    }
    if (strings::iequals(key, "domain") && !val.empty()) {
      cookie.cookie_domain = strings::to_lower(val);
    } else if (strings::iequals(key, "expires")) {
      if (auto t = parse_cookie_expiry(val, false, now)) cookie.expires_epoch = t;
    } else if (strings::iequals(key, "max-age")) {
      if (auto t = parse_cookie_expiry(val, true, now)) cookie.expires_epoch = t;
    }
  }
  return cookie;
}

web::ResourceKind kind_for_source(email::LoadSource source) {
  switch (source) {
    case email::LoadSource::ImgSrc:
    case email::LoadSource::SourceSrc:
    case email::LoadSource::InputImage:
    case email::LoadSource::LinkIcon:
    case email::LoadSource::BackgroundAttr:
      return web::ResourceKind::Image;
    case email::LoadSource::LinkStylesheet:
    case email::LoadSource::StyleUrl:
      return web::ResourceKind::Style;
    case email::LoadSource::ScriptSrc:
      return web::ResourceKind::Script;
    case email::LoadSource::IframeSrc:
      return web::ResourceKind::Document;
  }
  return web::ResourceKind::Other;
}

std::string resolve_location(const ParsedUrl& base, const std::string& location) {
  if (location.starts_with("http://") || location.starts_with("https://")) return location;
  std::string origin = base.scheme + "://" + base.host;
  if (!base.port.empty()) origin += ":" + base.port;
  if (location.starts_with("//")) return base.scheme + ":" + location;
  if (location.starts_with("/")) return origin + location;
  // Relative to the directory of the current path.
  std::string path = base.rest;
  size_t q = path.find_first_of("?#");
  if (q != std::string::npos) path.resize(q);
  size_t slash = path.rfind('/');
  path = (slash == std::string::npos) ? "/" : path.substr(0, slash + 1);
  return origin + path + location;
}

}  // namespace

std::string_view to_string(FetchErrorKind kind) {
  switch (kind) {
    case FetchErrorKind::BadUrl: return "BadUrl";
    case FetchErrorKind::UnsupportedScheme: return "UnsupportedScheme";
    case FetchErrorKind::DnsFailure: return "DnsFailure";
    case FetchErrorKind::ConnectionFailure: return "ConnectionFailure";
    case FetchErrorKind::Timeout: return "Timeout";
    case FetchErrorKind::HttpError: return "HttpError";
    case FetchErrorKind::TooManyRedirects: return "TooManyRedirects";
  }
  return "FetchError";
}

Result<web::CaptureSession, FetchError> static_fetch(const std::string& url,
                                                     const PublicSuffixList& psl,
                                                     const FetchOptions& options) {
  auto parsed = parse_url(url);
  if (!parsed.ok() || parsed.value().host.empty()) {
    return FetchError{FetchErrorKind::BadUrl, 0, "not an absolute URL: " + url};
  }
  ParsedUrl current = parsed.value();
  if (current.scheme.empty()) current.scheme = "http";
  if (current.scheme != "http" && current.scheme != "https") {
    return FetchError{FetchErrorKind::UnsupportedScheme, 0, "scheme " + current.scheme};
  }

  web::CaptureSession session;
  session.site = url;
  session.phase = web::Phase::PreConsent;
  session.fetched_at = iso8601_now();
  {
    auto site_domain = registrable_domain(current.host, psl);
    if (!site_domain.ok()) {
      return FetchError{FetchErrorKind::BadUrl, 0, "site host unparseable"};
    }
    session.site_domain = site_domain.value().domain;
  }

  const std::time_t now = std::time(nullptr);
  std::string body;
  int hops = 0;
  while (true) {
    if (!host_resolves(current.host)) {
      return FetchError{FetchErrorKind::DnsFailure, 0, "cannot resolve " + current.host};
    }
    int port = current.port.empty() ? (current.scheme == "https" ? 443 : 80)
                                    : std::stoi(current.port);

    httplib::Result res{nullptr, httplib::Error::Unknown};
    auto configure = [&](auto& client) {
      client.set_connection_timeout(options.timeout.count(), 0);
      client.set_read_timeout(options.timeout.count(), 0);
      client.set_follow_location(false);  // hops handled here to record each Set-Cookie
      std::string path = current.rest.empty() ? "/" : current.rest;
      if (path.front() != '/') path.insert(path.begin(), '/');
      res = client.Get(path);
    };
    if (current.scheme == "https") {
      httplib::SSLClient client(current.host, port);
      client.enable_server_certificate_verification(false);
      configure(client);
    } else {
      httplib::Client client(current.host, port);
      configure(client);
    }

    if (!res) {
      FetchErrorKind kind = FetchErrorKind::ConnectionFailure;
      if (res.error() == httplib::Error::ConnectionTimeout || res.error() == httplib::Error::Read) {
        kind = FetchErrorKind::Timeout;
      }
      return FetchError{kind, 0, httplib::to_string(res.error())};
    }

    auto range = res->headers.equal_range("Set-Cookie");
    for (auto it = range.first; it != range.second; ++it) {
      web::CookieRecord cookie = parse_set_cookie(it->second, current.host, now);
      cookie.party = web::classify_party(cookie.cookie_domain, session.site_domain, psl);
      session.cookies.push_back(std::move(cookie));
    }

    if (res->status >= 300 && res->status < 400) {
      std::string location = res->get_header_value("Location");
      if (location.empty()) {
        return FetchError{FetchErrorKind::HttpError, res->status, "redirect without Location"};
      }
      if (++hops > options.redirect_limit) {
        return FetchError{FetchErrorKind::TooManyRedirects, res->status,
                          "more than " + std::to_string(options.redirect_limit) + " redirects"};
      }
      auto next = parse_url(resolve_location(current, location));
      if (!next.ok()) {
        return FetchError{FetchErrorKind::BadUrl, 0, "unparseable redirect target"};
      }
      current = next.value();
      if (current.scheme.empty()) current.scheme = "http";
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      return FetchError{FetchErrorKind::HttpError, res->status,
                        "HTTP " + std::to_string(res->status)};
    }
    body = res->body;
    break;
  }

  // Loaded resources from the final document; links are not requests.
  email::UrlExtraction extraction = email::extract_urls(body);
  for (const auto& item : extraction.loaded) {
    auto target = parse_url(item.url);
    if (!target.ok()) continue;
    web::RequestRecord request;
    request.host = target.value().host;
    request.kind = kind_for_source(item.source);
    request.party = web::classify_party(request.host, session.site_domain, psl);
    session.requests.push_back(std::move(request));
  }
  return session;
}

}  // namespace trackaudit::fetch
