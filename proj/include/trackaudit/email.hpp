#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackaudit/domain.hpp"
#include "trackaudit/result.hpp"

namespace trackaudit::email {

enum class EmailErrorKind { MissingFromHeader, EmptyMessage };

struct EmailError {
  EmailErrorKind kind;
  std::string message;
};

struct BodyPart {
  std::string media_type;  // lowercase, e.g. "text/html"
  std::string text;        // transfer-decoded, charset-normalized to UTF-8 best effort
};

struct ParsedMessage {
  RegistrableDomain sender_domain;
  std::string sender_host;  // full domain of the From address
  std::string message_id_hash;
  std::vector<BodyPart> parts;
  std::vector<std::string> warnings;
};

/// RFC 5322/2045-style parse: header unfolding, multipart recursion, base64
/// and quoted-printable decoding. Undecodable parts are skipped with a
/// warning, never fatal. Only text/plain and text/html leaves are kept.
Result<ParsedMessage, EmailError> parse_message(std::string_view raw, const PublicSuffixList& psl);

/// Where a loaded URL came from. Script and iframe sources are auto-fetched
/// too but flagged so the image/style-only subset stays recoverable.
enum class LoadSource {
  ImgSrc,
  SourceSrc,
  InputImage,
  LinkStylesheet,
  LinkIcon,
  StyleUrl,
  BackgroundAttr,
  ScriptSrc,
  IframeSrc,
};

std::string_view to_string(LoadSource source);
bool is_autoload_extension(LoadSource source);  // true for ScriptSrc / IframeSrc

struct ExtractedUrl {
  std::string url;
  LoadSource source;
  bool tracking_pixel = false;  // img with width and height <= 1
};

struct UrlExtraction {
  std::vector<ExtractedUrl> loaded;
  std::vector<std::string> linkonly;  // a/@href, area/@href
};

/// Lenient scan of an HTML fragment. Relative URLs and non-hierarchical
/// schemes (mailto:, tel:, cid:, data:, javascript:) are dropped from both
/// sets.
UrlExtraction extract_urls(std::string_view html_text);

/// Privacy-redacted audit result: external findings keep registrable
/// domains only, never URLs, paths, or query strings.
struct EmailAuditRecord {
  std::string message_id_hash;
  RegistrableDomain sender_domain;
  std::set<std::string> loaded_external;
  std::set<std::string> script_iframe_only;  // subset of loaded_external seen only via script/iframe
  std::set<std::string> linkonly_external;
  std::set<std::string> pixel_domains;  // external domains serving a <=1x1 image
  int internal_count = 0;
  int allowlisted_count = 0;
  std::vector<std::string> warnings;
  // Full hostnames, populated only in debug mode ("loaded" / "linkonly").
  std::map<std::string, std::set<std::string>> debug_hosts;
};

struct AuditOptions {
  bool debug_hosts = false;
};

Result<EmailAuditRecord, EmailError> audit_email(std::string_view raw, const Allowlist& allow,
                                                 const PublicSuffixList& psl,
                                                 const AuditOptions& options = {});

nlohmann::ordered_json record_to_json(const EmailAuditRecord& record);
nlohmann::ordered_json record_to_json(const EmailAuditRecord& record, const std::string& source);
Result<EmailAuditRecord, std::string> record_from_json(const nlohmann::json& j);

struct ActorRow {
  std::string actor;  // registrable domain
  std::vector<std::string> sources;
};

/// One row per distinct loaded external domain across the corpus; sources
/// deduplicated and sorted. Rows sorted by actor domain.
std::vector<ActorRow> actor_table(
    const std::vector<std::pair<EmailAuditRecord, std::string>>& labeled_records);

std::string actor_table_csv(const std::vector<ActorRow>& rows);

}  // namespace trackaudit::email
