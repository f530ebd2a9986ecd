#include "trackaudit/web.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <set>

#include "trackaudit/digest.hpp"
#include "trackaudit/html.hpp"
#include "trackaudit/strings.hpp"

namespace trackaudit::web {

namespace {

std::string strip_leading_dot(std::string_view host) {
  while (!host.empty() && host.front() == '.') host.remove_prefix(1);
  return std::string(host);
}

// Comparison key for party/dedupe decisions: the registrable domain when one
// exists, the verbatim normalized host otherwise.
std::string domain_key(std::string_view host, const PublicSuffixList& psl) {
  std::string cleaned = strip_leading_dot(strings::trim(host));
  auto resolved = registrable_domain(cleaned, psl);
  if (resolved.ok()) return resolved.value().domain.value;
  return strings::to_lower(cleaned);
}

std::optional<long long> parse_expires(const nlohmann::json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) return static_cast<long long>(v.get<double>());
  if (v.is_string()) {
    std::tm tm{};
    const std::string s = v.get<std::string>();
    if (strptime(s.c_str(), "%Y-%m-%dT%H:%M:%S", &tm) != nullptr) {
      return static_cast<long long>(timegm(&tm));
    }
  }
  return std::nullopt;
}

Result<CaptureSession, std::string> parse_session_common(const nlohmann::json& j,
                                                         const PublicSuffixList& psl,
                                                         bool values_are_raw) {
  if (!j.is_object()) return std::string("capture must be a JSON object");
  if (j.contains("schema")) {
    std::string schema = j.at("schema").get<std::string>();
    if (schema != kCaptureSchema) {
      return "unsupported capture schema '" + schema + "'";
    }
  }
  if (!j.contains("site") || !j.contains("phase")) {
    return std::string("capture needs site and phase");
  }

  CaptureSession session;
  session.site = j.at("site").get<std::string>();
  auto parsed_site = parse_url(session.site);
  if (!parsed_site.ok()) {
    // A bare hostname is accepted as a site.
    auto host_only = registrable_domain(session.site, psl);
    if (!host_only.ok()) return "capture site is not a URL or hostname: " + session.site;
    session.site_domain = host_only.value().domain;
  } else {
    auto resolved = registrable_domain(parsed_site.value().host, psl);
    if (!resolved.ok()) return "capture site host unparseable: " + session.site;
    session.site_domain = resolved.value().domain;
  }

  auto phase = phase_from_string(j.at("phase").get<std::string>());
  if (!phase) return std::string("capture phase must be pre_consent or post_consent");
  session.phase = *phase;
  session.fetched_at = j.value("fetched_at", "");

  if (j.contains("cookies")) {
    for (const auto& c : j.at("cookies")) {
      CookieRecord cookie;
      cookie.name = c.value("name", "");
      cookie.cookie_domain = c.value("domain", "");
      if (values_are_raw) {
        cookie.value_hash = digest_hex(c.value("value", ""));
      } else {
        cookie.value_hash = c.value("value_hash", "");
      }
      if (c.contains("expires") && !c.at("expires").is_null()) {
        cookie.expires_epoch = parse_expires(c.at("expires"));
      }
      cookie.party = classify_party(cookie.cookie_domain, session.site_domain, psl);
      session.cookies.push_back(std::move(cookie));
    }
  }
  if (j.contains("requests")) {
    for (const auto& r : j.at("requests")) {
      RequestRecord request;
      if (values_are_raw) {
        std::string url = r.value("url", "");
        auto parsed = parse_url(url);
        if (!parsed.ok()) continue;  // non-fetchable entry
        request.host = parsed.value().host;
      } else {
        request.host = r.value("host", "");
      }
      auto kind = resource_kind_from_string(r.value("kind", "other"));
      request.kind = kind.value_or(ResourceKind::Other);
      request.party = classify_party(request.host, session.site_domain, psl);
      session.requests.push_back(std::move(request));
    }
  }
  return session;
}

Result<CaptureSession, std::string> load_json_file(
    const std::filesystem::path& file, const PublicSuffixList& psl, bool values_are_raw) {
  std::ifstream in(file);
  if (!in) return "cannot open capture: " + file.string();
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) return "invalid JSON in " + file.string();
  auto result = parse_session_common(j, psl, values_are_raw);
  if (!result.ok()) return file.filename().string() + ": " + result.error();
  return result;
}

}  // namespace

std::string_view to_string(Phase phase) {
  return phase == Phase::PreConsent ? "pre_consent" : "post_consent";
}

std::string_view to_string(Party party) { return party == Party::First ? "first" : "third"; }

std::string_view to_string(ResourceKind kind) {
  switch (kind) {
    case ResourceKind::Document: return "document";
    case ResourceKind::Image: return "image";
    case ResourceKind::Style: return "style";
    case ResourceKind::Script: return "script";
    case ResourceKind::Other: return "other";
  }
  return "other";
}

std::optional<Phase> phase_from_string(std::string_view s) {
  if (s == "pre_consent" || s == "pre") return Phase::PreConsent;
  if (s == "post_consent" || s == "post") return Phase::PostConsent;
  return std::nullopt;
}

std::optional<ResourceKind> resource_kind_from_string(std::string_view s) {
  if (s == "document") return ResourceKind::Document;
  if (s == "image") return ResourceKind::Image;
  if (s == "style") return ResourceKind::Style;
  if (s == "script") return ResourceKind::Script;
  if (s == "other") return ResourceKind::Other;
  return std::nullopt;
}

std::string_view to_string(BannerStrategy strategy) {
  switch (strategy) {
    case BannerStrategy::ByClass: return "by_class";
    case BannerStrategy::ById: return "by_id";
    case BannerStrategy::ByText: return "by_text";
    case BannerStrategy::None: return "none";
  }
  return "none";
}

Party classify_party(std::string_view host, const RegistrableDomain& site_domain,
                     const PublicSuffixList& psl) {
  return domain_key(host, psl) == site_domain.value ? Party::First : Party::Third;
}

std::vector<CookieRecord> dedupe_cookies(std::vector<CookieRecord> cookies,
                                         const PublicSuffixList& psl) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<CookieRecord> out;
  out.reserve(cookies.size());
  for (auto& cookie : cookies) {
    auto key = std::make_pair(cookie.name, domain_key(cookie.cookie_domain, psl));
    if (seen.insert(std::move(key)).second) {
      out.push_back(std::move(cookie));
    }
  }
  return out;
}

const std::vector<std::string>& default_accept_texts() {
  static const std::vector<std::string> kTexts = {
      "Accepter", "Ok, tout accepter", "Oui, je suis d'accord", "Ok", "J'accepte",
  };
  return kTexts;
}

BannerProbe locate_consent_button(std::string_view html_text,
                                  std::span<const std::string> accept_texts,
                                  std::span<const std::string> class_hints,
                                  std::span<const std::string> id_hints) {
  const std::vector<html::Element> elements = html::parse(html_text);

  auto probe_from = [](const html::Element& el, BannerStrategy strategy) {
    BannerProbe probe;
    probe.matched = true;
    probe.strategy = strategy;
    std::string text = strings::normalize_phrase(el.text);
    if (text.empty()) {
      if (const std::string* value = el.attr("value")) text = strings::normalize_phrase(*value);
    }
    if (!text.empty()) probe.matched_text = text;
    return probe;
  };

  // Pass 1: class hints.
  for (const auto& el : elements) {
    const std::string* cls = el.attr("class");
    if (!cls) continue;
    for (const auto& hint : class_hints) {
      if (!hint.empty() && strings::contains_ci(*cls, hint)) {
        return probe_from(el, BannerStrategy::ByClass);
      }
    }
  }
  // Pass 2: id hints.
  for (const auto& el : elements) {
    const std::string* id = el.attr("id");
    if (!id) continue;
    for (const auto& hint : id_hints) {
      if (!hint.empty() && strings::contains_ci(*id, hint)) {
        return probe_from(el, BannerStrategy::ById);
      }
    }
  }
  // Pass 3: accept text on clickable elements.
  std::vector<std::string> normalized_texts;
  normalized_texts.reserve(accept_texts.size());
  for (const auto& t : accept_texts) normalized_texts.push_back(strings::normalize_phrase(t));
  for (const auto& el : elements) {
    std::string candidate;
    if (el.tag == "a" || el.tag == "button") {
      candidate = strings::normalize_phrase(el.text);
    } else if (el.tag == "input") {
      const std::string* type = el.attr("type");
      if (!type || !(strings::iequals(*type, "submit") || strings::iequals(*type, "button"))) {
        continue;
      }
      if (const std::string* value = el.attr("value")) {
        candidate = strings::normalize_phrase(*value);
      }
    } else {
      continue;
    }
    if (candidate.empty()) continue;
    for (const auto& text : normalized_texts) {
      if (!text.empty() && candidate == text) {
        BannerProbe probe;
        probe.matched = true;
        probe.strategy = BannerStrategy::ByText;
        probe.matched_text = candidate;
        return probe;
      }
    }
  }
  return BannerProbe{};
}

Result<CaptureSession, std::string> parse_capture_json(const nlohmann::json& j,
                                                       const PublicSuffixList& psl) {
  return parse_session_common(j, psl, /*values_are_raw=*/true);
}

Result<CaptureSession, std::string> load_capture_file(const std::filesystem::path& file,
                                                      const PublicSuffixList& psl) {
  return load_json_file(file, psl, /*values_are_raw=*/true);
}

nlohmann::ordered_json session_to_json(const CaptureSession& session) {
  nlohmann::ordered_json j;
  j["schema"] = kCaptureSchema;
  j["site"] = session.site;
  j["phase"] = std::string(to_string(session.phase));
  j["fetched_at"] = session.fetched_at;
  auto& cookies = j["cookies"] = nlohmann::ordered_json::array();
  for (const auto& c : session.cookies) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["domain"] = c.cookie_domain;
    jc["value_hash"] = c.value_hash;
    if (c.expires_epoch) jc["expires"] = *c.expires_epoch;
    jc["party"] = std::string(to_string(c.party));
    cookies.push_back(std::move(jc));
  }
  auto& requests = j["requests"] = nlohmann::ordered_json::array();
  for (const auto& r : session.requests) {
    nlohmann::ordered_json jr;
    jr["host"] = r.host;
    jr["kind"] = std::string(to_string(r.kind));
    jr["party"] = std::string(to_string(r.party));
    requests.push_back(std::move(jr));
  }
  return j;
}

Result<CaptureSession, std::string> parse_session_json(const nlohmann::json& j,
                                                       const PublicSuffixList& psl) {
  return parse_session_common(j, psl, /*values_are_raw=*/false);
}

Result<CaptureSession, std::string> load_session_file(const std::filesystem::path& file,
                                                      const PublicSuffixList& psl) {
  return load_json_file(file, psl, /*values_are_raw=*/false);
}

Result<SiteSummary, SiteReportError> site_report(const CaptureSession& pre,
                                                 const CaptureSession* post,
                                                 const PublicSuffixList& psl) {
  if (pre.phase != Phase::PreConsent) {
    return SiteReportError{SiteReportErrorKind::PhaseMismatch,
                           "first session must be pre-consent"};
  }
  if (post != nullptr) {
    if (post->phase != Phase::PostConsent) {
      return SiteReportError{SiteReportErrorKind::PhaseMismatch,
                             "second session must be post-consent"};
    }
    if (post->site_domain != pre.site_domain) {
      return SiteReportError{SiteReportErrorKind::SiteMismatch,
                             "sessions cover different sites"};
    }
  }

  SiteSummary summary;
  summary.site = pre.site;
  summary.site_domain = pre.site_domain.value;

  std::set<std::string> cookie_domains;
  std::set<std::string> request_domains;
  auto tally = [&](const CaptureSession& session, int& first_cookies, int& third_cookies,
                   int& third_requests) {
    for (const auto& cookie : dedupe_cookies(session.cookies, psl)) {
      if (cookie.party == Party::First) {
        ++first_cookies;
      } else {
        ++third_cookies;
        cookie_domains.insert(domain_key(cookie.cookie_domain, psl));
      }
    }
    for (const auto& request : session.requests) {
      if (request.party == Party::Third) {
        ++third_requests;
        request_domains.insert(domain_key(request.host, psl));
      }
    }
  };

  tally(pre, summary.first_cookies_pre, summary.third_cookies_pre, summary.third_requests_pre);
  if (post != nullptr) {
    summary.has_post = true;
    tally(*post, summary.first_cookies_post, summary.third_cookies_post,
          summary.third_requests_post);
    summary.delta_third_cookies = summary.third_cookies_post - summary.third_cookies_pre;
  }
  summary.third_cookie_domains.assign(cookie_domains.begin(), cookie_domains.end());
  summary.third_request_domains.assign(request_domains.begin(), request_domains.end());
  return summary;
}

}  // namespace trackaudit::web
