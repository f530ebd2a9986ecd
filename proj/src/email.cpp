#include "trackaudit/email.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

#include "trackaudit/csv.hpp"
#include "trackaudit/digest.hpp"
#include "trackaudit/html.hpp"
#include "trackaudit/strings.hpp"

namespace trackaudit::email {

namespace {

struct Header {
  std::string name;  // lowercase
  std::string value;
};

struct HeaderBlock {
  std::vector<Header> headers;
  size_t body_offset = 0;

  const std::string* first(std::string_view name) const {
    for (const auto& h : headers) {
      if (h.name == name) return &h.value;
    }
    return nullptr;
  }
  size_t count(std::string_view name) const {
    size_t n = 0;
    for (const auto& h : headers) {
      if (h.name == name) ++n;
    }
    return n;
  }
};

// Unfolds continuation lines; stops at the first blank line.
HeaderBlock parse_headers(std::string_view raw) {
  HeaderBlock block;
  size_t pos = 0;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    size_t colon = current.find(':');
    if (colon != std::string::npos) {
      std::string name = strings::to_lower(strings::trim(std::string_view(current).substr(0, colon)));
      std::string value(strings::trim(std::string_view(current).substr(colon + 1)));
      block.headers.push_back({std::move(name), std::move(value)});
    }
    current.clear();
  };
  while (pos < raw.size()) {
    size_t eol = raw.find('\n', pos);
    size_t line_end = (eol == std::string_view::npos) ? raw.size() : eol;
    std::string_view line = raw.substr(pos, line_end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    size_t next = (eol == std::string_view::npos) ? raw.size() : eol + 1;
    if (line.empty()) {
      flush();
      block.body_offset = next;
      return block;
    }
    if (line[0] == ' ' || line[0] == '\t') {
      current.push_back(' ');
      current.append(strings::trim(line));
    } else {
      flush();
      current.assign(line);
    }
    pos = next;
  }
  flush();
  block.body_offset = raw.size();
  return block;
}

struct ContentType {
  std::string media_type = "text/plain";
  std::map<std::string, std::string> params;  // lowercase keys
};

ContentType parse_content_type(std::string_view value) {
  ContentType ct;
  auto parts = strings::split(value, ';');
  if (!parts.empty()) {
    auto mt = strings::trim(parts[0]);
    if (!mt.empty()) ct.media_type = strings::to_lower(mt);
  }
  for (size_t i = 1; i < parts.size(); ++i) {
    auto p = strings::trim(parts[i]);
    size_t eq = p.find('=');
    if (eq == std::string_view::npos) continue;
    std::string key = strings::to_lower(strings::trim(p.substr(0, eq)));
    auto v = strings::trim(p.substr(eq + 1));
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    ct.params[key] = std::string(v);
  }
  return ct;
}

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

bool decode_base64(std::string_view in, std::string& out) {
  out.clear();
  out.reserve(in.size() * 3 / 4);
  unsigned buffer = 0;
  int bits = 0;
  for (char c : in) {
    if (c == '\r' || c == '\n' || c == ' ' || c == '\t') continue;
    if (c == '=') break;
    int v = b64_value(c);
    if (v < 0) return false;
    buffer = (buffer << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
    }
  }
  return true;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string decode_quoted_printable(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  size_t i = 0;
  while (i < in.size()) {
    char c = in[i];
    if (c != '=') {
      out.push_back(c);
      ++i;
      continue;
    }
    // Soft line break: "=\r\n" or "=\n".
    if (i + 1 < in.size() && in[i + 1] == '\n') {
      i += 2;
      continue;
    }
    if (i + 2 < in.size() && in[i + 1] == '\r' && in[i + 2] == '\n') {
      i += 3;
      continue;
    }
    if (i + 2 < in.size()) {
      int hi = hex_value(in[i + 1]);
      int lo = hex_value(in[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 3;
        continue;
      }
    }
    out.push_back(c);  // malformed escape kept verbatim
    ++i;
  }
  return out;
}

std::string latin1_to_utf8(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (unsigned char c : in) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

// Extracts the first addr-spec from a From header value. Returns the domain
// part, or empty when no address is present.
std::string from_header_domain(std::string_view value, bool& multiple) {
  multiple = false;
  // Angle-bracket form takes priority: "Name <a@b>".
  size_t lt = value.find('<');
  std::string_view addr;
  if (lt != std::string_view::npos) {
    size_t gt = value.find('>', lt + 1);
    addr = value.substr(lt + 1, (gt == std::string_view::npos ? value.size() : gt) - lt - 1);
    if (value.find('<', lt + 1) != std::string_view::npos) multiple = true;
  } else {
    auto candidates = strings::split(value, ',');
    if (candidates.size() > 1) multiple = true;
    addr = strings::trim(candidates.empty() ? value : candidates[0]);
  }
  addr = strings::trim(addr);
  size_t at = addr.rfind('@');
  if (at == std::string_view::npos) return "";
  auto domain = strings::trim(addr.substr(at + 1));
  while (!domain.empty() && (domain.back() == '>' || domain.back() == '.')) domain.remove_suffix(1);
  return strings::to_lower(domain);
}

struct PartCollector {
  std::vector<BodyPart> parts;
  std::vector<std::string> warnings;
};

void collect_parts(std::string_view raw, const HeaderBlock& headers, PartCollector& out,
                   int depth) {
  if (depth > 8) {
    out.warnings.push_back("multipart nesting too deep; inner parts skipped");
    return;
  }
  ContentType ct;
  if (const std::string* v = headers.first("content-type")) ct = parse_content_type(*v);
  std::string_view body = raw.substr(std::min(headers.body_offset, raw.size()));

  if (ct.media_type.starts_with("multipart/")) {
    auto it = ct.params.find("boundary");
    if (it == ct.params.end() || it->second.empty()) {
      out.warnings.push_back("multipart part without boundary skipped");
      return;
    }
    std::string delim = "--" + it->second;
    std::vector<std::string_view> sections;
    size_t pos = 0;
    size_t current_start = std::string_view::npos;
    while (pos <= body.size()) {
      size_t hit = body.find(delim, pos);
      if (hit == std::string_view::npos) break;
      // Delimiter must start a line.
      if (hit != 0 && body[hit - 1] != '\n') {
        pos = hit + delim.size();
        continue;
      }
      if (current_start != std::string_view::npos) {
        size_t end = hit;
        if (end > current_start && body[end - 1] == '\n') --end;
        if (end > current_start && body[end - 1] == '\r') --end;
        sections.push_back(body.substr(current_start, end - current_start));
      }
      size_t after = hit + delim.size();
      bool at_line_end = after >= body.size() || body[after] == '\r' || body[after] == '\n';
      bool closing = body.compare(after, 2, "--") == 0;
      if (!at_line_end && !closing) {
        // A longer boundary (e.g. a nested part) sharing this prefix.
        pos = after;
        continue;
      }
      size_t eol = body.find('\n', after);
      if (closing || eol == std::string_view::npos) {
        current_start = std::string_view::npos;
        break;
      }
      current_start = eol + 1;
      pos = current_start;
    }
    if (current_start != std::string_view::npos) {
      sections.push_back(body.substr(current_start));
    }
    for (auto section : sections) {
      HeaderBlock child = parse_headers(section);
      collect_parts(section, child, out, depth + 1);
    }
    return;
  }

  if (!(ct.media_type == "text/plain" || ct.media_type == "text/html")) {
    return;  // attachments and other media are out of scope
  }

  std::string encoding = "7bit";
  if (const std::string* v = headers.first("content-transfer-encoding")) {
    encoding = strings::to_lower(strings::trim(*v));
  }
  std::string decoded;
  if (encoding == "base64") {
    if (!decode_base64(body, decoded)) {
      out.warnings.push_back("undecodable base64 " + ct.media_type + " part skipped");
      return;
    }
  } else if (encoding == "quoted-printable") {
    decoded = decode_quoted_printable(body);
  } else {
    decoded.assign(body);
  }

  std::string charset = "utf-8";
  if (auto it = ct.params.find("charset"); it != ct.params.end()) {
    charset = strings::to_lower(it->second);
  }
  if (charset == "iso-8859-1" || charset == "iso8859-1" || charset == "latin1" ||
      charset == "windows-1252" || charset == "cp1252") {
    decoded = latin1_to_utf8(decoded);
  } else if (!(charset == "utf-8" || charset == "utf8" || charset == "us-ascii" ||
               charset == "ascii")) {
    out.warnings.push_back("unknown charset '" + charset + "' passed through");
  }
  out.parts.push_back({ct.media_type, std::move(decoded)});
}

}  // namespace

std::string_view to_string(LoadSource source) {
  switch (source) {
    case LoadSource::ImgSrc: return "img";
    case LoadSource::SourceSrc: return "source";
    case LoadSource::InputImage: return "input-image";
    case LoadSource::LinkStylesheet: return "stylesheet";
    case LoadSource::LinkIcon: return "icon";
    case LoadSource::StyleUrl: return "style-url";
    case LoadSource::BackgroundAttr: return "background";
    case LoadSource::ScriptSrc: return "script";
    case LoadSource::IframeSrc: return "iframe";
  }
  return "unknown";
}

bool is_autoload_extension(LoadSource source) {
  return source == LoadSource::ScriptSrc || source == LoadSource::IframeSrc;
}

Result<ParsedMessage, EmailError> parse_message(std::string_view raw, const PublicSuffixList& psl) {
  if (strings::trim(raw).empty()) {
    return EmailError{EmailErrorKind::EmptyMessage, "empty message"};
  }
  HeaderBlock headers = parse_headers(raw);
  const std::string* from = headers.first("from");
  if (!from) {
    return EmailError{EmailErrorKind::MissingFromHeader, "no From header"};
  }

  ParsedMessage msg;
  if (headers.count("from") > 1) {
    msg.warnings.push_back("multiple From headers; first one wins");
  }
  bool multiple_addresses = false;
  std::string domain = from_header_domain(*from, multiple_addresses);
  if (domain.empty()) {
    return EmailError{EmailErrorKind::MissingFromHeader, "From header carries no address"};
  }
  if (multiple_addresses) {
    msg.warnings.push_back("multiple From addresses; first one wins");
  }
  auto sender = registrable_domain(domain, psl);
  if (!sender.ok()) {
    return EmailError{EmailErrorKind::MissingFromHeader, "From domain is not a hostname"};
  }
  msg.sender_host = domain;
  msg.sender_domain = sender.value().domain;

  if (const std::string* mid = headers.first("message-id")) {
    msg.message_id_hash = digest_hex(strings::trim(*mid));
  } else {
    msg.message_id_hash = digest_hex(raw);
  }

  PartCollector collector;
  collect_parts(raw, headers, collector, 0);
  msg.parts = std::move(collector.parts);
  for (auto& w : collector.warnings) msg.warnings.push_back(std::move(w));
  return msg;
}

UrlExtraction extract_urls(std::string_view html_text) {
  UrlExtraction out;
  auto keep = [](std::string_view url) {
    auto parsed = parse_url(url);
    return parsed.ok();
  };
  auto add_loaded = [&](std::string_view url, LoadSource source, bool pixel = false) {
    auto trimmed = strings::trim(url);
    if (!trimmed.empty() && keep(trimmed)) {
      out.loaded.push_back({std::string(trimmed), source, pixel});
    }
  };

  for (const auto& el : html::parse(html_text)) {
    // style="" and background="" can sit on any element.
    if (const std::string* style = el.attr("style")) {
      for (const auto& u : html::extract_css_urls(*style)) add_loaded(u, LoadSource::StyleUrl);
    }
    if (const std::string* bg = el.attr("background")) {
      add_loaded(*bg, LoadSource::BackgroundAttr);
    }

    if (el.tag == "img") {
      if (const std::string* src = el.attr("src")) {
        bool pixel = false;
        const std::string* w = el.attr("width");
        const std::string* h = el.attr("height");
        if (w && h) {
          auto dim = [](const std::string& s) {
            char* end = nullptr;
            double v = std::strtod(s.c_str(), &end);
            return (end != s.c_str()) ? v : -1.0;
          };
          double wv = dim(*w), hv = dim(*h);
          pixel = wv >= 0 && hv >= 0 && wv <= 1.0 && hv <= 1.0;
        }
        add_loaded(*src, LoadSource::ImgSrc, pixel);
      }
    } else if (el.tag == "source") {
      if (const std::string* src = el.attr("src")) add_loaded(*src, LoadSource::SourceSrc);
    } else if (el.tag == "input") {
      const std::string* type = el.attr("type");
      if (type && strings::iequals(*type, "image")) {
        if (const std::string* src = el.attr("src")) add_loaded(*src, LoadSource::InputImage);
      }
    } else if (el.tag == "link") {
      const std::string* rel = el.attr("rel");
      const std::string* href = el.attr("href");
      if (rel && href) {
        bool stylesheet = false, icon = false;
        for (auto token : strings::split_ws(*rel)) {
          if (strings::iequals(token, "stylesheet")) stylesheet = true;
          if (strings::iequals(token, "icon")) icon = true;
        }
        if (stylesheet) add_loaded(*href, LoadSource::LinkStylesheet);
        else if (icon) add_loaded(*href, LoadSource::LinkIcon);
      }
    } else if (el.tag == "style") {
      for (const auto& u : html::extract_css_urls(el.text)) add_loaded(u, LoadSource::StyleUrl);
    } else if (el.tag == "script") {
      if (const std::string* src = el.attr("src")) add_loaded(*src, LoadSource::ScriptSrc);
    } else if (el.tag == "iframe") {
      if (const std::string* src = el.attr("src")) add_loaded(*src, LoadSource::IframeSrc);
    } else if (el.tag == "a" || el.tag == "area") {
      if (const std::string* href = el.attr("href")) {
        auto trimmed = strings::trim(*href);
        if (!trimmed.empty() && keep(trimmed)) out.linkonly.emplace_back(trimmed);
      }
    }
  }
  return out;
}

Result<EmailAuditRecord, EmailError> audit_email(std::string_view raw, const Allowlist& allow,
                                                 const PublicSuffixList& psl,
                                                 const AuditOptions& options) {
  auto parsed = parse_message(raw, psl);
  if (!parsed.ok()) return parsed.error();
  const ParsedMessage& msg = parsed.value();

  EmailAuditRecord record;
  record.message_id_hash = msg.message_id_hash;
  record.sender_domain = msg.sender_domain;
  record.warnings = msg.warnings;

  struct LoadedInfo {
    std::set<LoadSource> sources;
    bool pixel = false;
  };
  std::map<std::string, LoadedInfo> loaded_by_url;
  std::set<std::string> linkonly_urls;
  for (const auto& part : msg.parts) {
    if (part.media_type != "text/html") continue;
    UrlExtraction extraction = extract_urls(part.text);
    for (const auto& item : extraction.loaded) {
      auto& info = loaded_by_url[item.url];
      info.sources.insert(item.source);
      info.pixel = info.pixel || item.tracking_pixel;
    }
    for (const auto& url : extraction.linkonly) linkonly_urls.insert(url);
  }

  // domain -> saw a non-script/iframe load
  std::map<std::string, bool> external_loaded_direct;
  int unparseable = 0;
  for (const auto& [url, info] : loaded_by_url) {
    auto origin = classify_origin(url, record.sender_domain, allow, psl);
    if (!origin.ok()) {
      ++unparseable;
      continue;
    }
    const OriginResult& o = origin.value();
    switch (o.kind) {
      case OriginKind::Internal:
        ++record.internal_count;
        break;
      case OriginKind::Allowlisted:
        ++record.allowlisted_count;
        break;
      case OriginKind::External: {
        const std::string& domain = o.host_domain.domain.value;
        bool direct = std::any_of(info.sources.begin(), info.sources.end(),
                                  [](LoadSource s) { return !is_autoload_extension(s); });
        auto [it, _] = external_loaded_direct.try_emplace(domain, false);
        it->second = it->second || direct;
        if (info.pixel) record.pixel_domains.insert(domain);
        if (options.debug_hosts) record.debug_hosts["loaded"].insert(o.host);
        break;
      }
    }
  }
  for (const auto& [domain, direct] : external_loaded_direct) {
    record.loaded_external.insert(domain);
    if (!direct) record.script_iframe_only.insert(domain);
  }

  for (const auto& url : linkonly_urls) {
    auto origin = classify_origin(url, record.sender_domain, allow, psl);
    if (!origin.ok()) {
      ++unparseable;
      continue;
    }
    const OriginResult& o = origin.value();
    switch (o.kind) {
      case OriginKind::Internal:
        ++record.internal_count;
        break;
      case OriginKind::Allowlisted:
        ++record.allowlisted_count;
        break;
      case OriginKind::External:
        record.linkonly_external.insert(o.host_domain.domain.value);
        if (options.debug_hosts) record.debug_hosts["linkonly"].insert(o.host);
        break;
    }
  }
  if (unparseable > 0) {
    record.warnings.push_back(std::to_string(unparseable) + " unparseable url(s) skipped");
  }
  return record;
}

nlohmann::ordered_json record_to_json(const EmailAuditRecord& record) {
  nlohmann::ordered_json j;
  j["message_id_hash"] = record.message_id_hash;
  j["sender_domain"] = record.sender_domain.value;
  j["loaded_external"] = record.loaded_external;
  j["script_iframe_only"] = record.script_iframe_only;
  j["linkonly_external"] = record.linkonly_external;
  j["pixel_domains"] = record.pixel_domains;
  j["internal_count"] = record.internal_count;
  j["allowlisted_count"] = record.allowlisted_count;
  if (!record.warnings.empty()) j["warnings"] = record.warnings;
  if (!record.debug_hosts.empty()) j["debug_hosts"] = record.debug_hosts;
  return j;
}

nlohmann::ordered_json record_to_json(const EmailAuditRecord& record, const std::string& source) {
  auto j = record_to_json(record);
  j["source"] = source;
  return j;
}

Result<EmailAuditRecord, std::string> record_from_json(const nlohmann::json& j) {
  try {
    EmailAuditRecord record;
    record.message_id_hash = j.value("message_id_hash", "");
    record.sender_domain.value = j.at("sender_domain").get<std::string>();
    auto read_set = [&](const char* key, std::set<std::string>& out) {
      if (j.contains(key)) out = j.at(key).get<std::set<std::string>>();
    };
    read_set("loaded_external", record.loaded_external);
    read_set("script_iframe_only", record.script_iframe_only);
    read_set("linkonly_external", record.linkonly_external);
    read_set("pixel_domains", record.pixel_domains);
    record.internal_count = j.value("internal_count", 0);
    record.allowlisted_count = j.value("allowlisted_count", 0);
    return record;
  } catch (const nlohmann::json::exception& e) {
    return std::string("bad email record: ") + e.what();
  }
}

std::vector<ActorRow> actor_table(
    const std::vector<std::pair<EmailAuditRecord, std::string>>& labeled_records) {
  std::map<std::string, std::set<std::string>> sources_by_actor;
  for (const auto& [record, label] : labeled_records) {
    for (const auto& domain : record.loaded_external) {
      sources_by_actor[domain].insert(label);
    }
  }
  std::vector<ActorRow> rows;
  rows.reserve(sources_by_actor.size());
  for (auto& [actor, sources] : sources_by_actor) {
    rows.push_back({actor, {sources.begin(), sources.end()}});
  }
  return rows;
}

std::string actor_table_csv(const std::vector<ActorRow>& rows) {
  std::string out = "actor,sources\n";
  for (const auto& row : rows) {
    std::string joined;
    for (size_t i = 0; i < row.sources.size(); ++i) {
      if (i) joined.push_back(';');
      joined += row.sources[i];
    }
    out += csv::join_row({row.actor, joined});
    out.push_back('\n');
  }
  return out;
}

}  // namespace trackaudit::email
