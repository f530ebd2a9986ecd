#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackaudit/domain.hpp"
#include "trackaudit/result.hpp"

namespace trackaudit::web {

enum class Phase { PreConsent, PostConsent };
enum class Party { First, Third };
enum class ResourceKind { Document, Image, Style, Script, Other };

std::string_view to_string(Phase phase);
std::string_view to_string(Party party);
std::string_view to_string(ResourceKind kind);
std::optional<Phase> phase_from_string(std::string_view s);
std::optional<ResourceKind> resource_kind_from_string(std::string_view s);

struct CookieRecord {
  std::string name;
  std::string cookie_domain;  // as observed; leading dot permitted
  std::string value_hash;     // digest only, raw value never stored
  std::optional<long long> expires_epoch;
  Party party = Party::Third;
};

struct RequestRecord {
  std::string host;
  Party party = Party::Third;
  ResourceKind kind = ResourceKind::Other;
};

struct CaptureSession {
  std::string site;  // as listed, e.g. "https://laposte.fr/"
  RegistrableDomain site_domain;
  Phase phase = Phase::PreConsent;
  std::string fetched_at;  // ISO 8601, informational
  std::vector<CookieRecord> cookies;
  std::vector<RequestRecord> requests;
};

/// First party iff the host's registrable domain equals the site's.
/// Hosts that resolve to no registrable domain (IP literals, bare suffixes)
/// compare by their verbatim value.
Party classify_party(std::string_view host, const RegistrableDomain& site_domain,
                     const PublicSuffixList& psl);

/// Unique by (name, registrable domain of the cookie domain); the earliest
/// occurrence is kept and input order is preserved.
std::vector<CookieRecord> dedupe_cookies(std::vector<CookieRecord> cookies,
                                         const PublicSuffixList& psl);

enum class BannerStrategy { ByClass, ById, ByText, None };

std::string_view to_string(BannerStrategy strategy);

struct BannerProbe {
  bool matched = false;
  BannerStrategy strategy = BannerStrategy::None;
  std::optional<std::string> matched_text;
};

/// The accept wordings observed in the wild; no normalization exists.
const std::vector<std::string>& default_accept_texts();

/// Search order is fixed: class hints first, then id hints, then visible
/// text of clickable elements (a, button, input[type=submit|button]). Hint
/// matching is case-insensitive substring over the attribute; text matching
/// is case-insensitive with whitespace collapsed. Absence is a None probe.
BannerProbe locate_consent_button(std::string_view html_text,
                                  std::span<const std::string> accept_texts,
                                  std::span<const std::string> class_hints,
                                  std::span<const std::string> id_hints);

inline BannerProbe locate_consent_button(std::string_view html_text) {
  return locate_consent_button(html_text, default_accept_texts(), {}, {});
}

inline constexpr std::string_view kCaptureSchema = "trackaudit.capture/1";

/// External capture schema: {schema?, site, phase, fetched_at?, cookies:
/// [{name, domain, value, expires?}], requests:[{url, kind?}]}. Cookie
/// values are hashed on ingest; party is computed, never trusted.
Result<CaptureSession, std::string> parse_capture_json(const nlohmann::json& j,
                                                       const PublicSuffixList& psl);
Result<CaptureSession, std::string> load_capture_file(const std::filesystem::path& file,
                                                      const PublicSuffixList& psl);

/// Internal session form (values already hashed) used for persisted fetches.
nlohmann::ordered_json session_to_json(const CaptureSession& session);
Result<CaptureSession, std::string> parse_session_json(const nlohmann::json& j,
                                                       const PublicSuffixList& psl);
Result<CaptureSession, std::string> load_session_file(const std::filesystem::path& file,
                                                      const PublicSuffixList& psl);

struct SiteSummary {
  std::string site;
  std::string site_domain;
  int first_cookies_pre = 0;
  int third_cookies_pre = 0;
  int third_requests_pre = 0;
  bool has_post = false;
  int first_cookies_post = 0;
  int third_cookies_post = 0;
  int third_requests_post = 0;
  int delta_third_cookies = 0;  // post - pre, valid when has_post
  std::vector<std::string> third_cookie_domains;   // distinct, sorted
  std::vector<std::string> third_request_domains;  // distinct, sorted

  /// Ranking key: the consent-accepted visit when captured, else the first.
  int ranking_third_cookies() const { return has_post ? third_cookies_post : third_cookies_pre; }
};

enum class SiteReportErrorKind { PhaseMismatch, SiteMismatch };

struct SiteReportError {
  SiteReportErrorKind kind;
  std::string message;
};

/// Per-site summary over one or two phases. Cookies are deduplicated before
/// counting, so first + third always equals the deduped total.
Result<SiteSummary, SiteReportError> site_report(const CaptureSession& pre,
                                                 const CaptureSession* post,
                                                 const PublicSuffixList& psl);

}  // namespace trackaudit::web
