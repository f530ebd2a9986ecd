#include "trackaudit/domain.hpp"

#include <fstream>
#include <sstream>

#include "trackaudit/strings.hpp"

namespace trackaudit {

namespace {

bool is_hostname_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
}

bool looks_like_ipv4(const std::vector<std::string_view>& labels) {
  if (labels.size() != 4) return false;
  for (auto label : labels) {
    if (label.empty() || label.size() > 3) return false;
    int v = 0;
    for (char c : label) {
      if (c < '0' || c > '9') return false;
      v = v * 10 + (c - '0');
    }
    if (v > 255) return false;
  }
  return true;
}

bool looks_like_ipv6(std::string_view host) {
  if (host.find(':') == std::string_view::npos) return false;
  for (char c : host) {
    bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || c == ':' || c == '.';
    if (!ok) return false;
  }
  return true;
}

std::string join_labels(const std::vector<std::string_view>& labels, size_t from) {
  std::string out;
  for (size_t i = from; i < labels.size(); ++i) {
    if (i > from) out.push_back('.');
    out.append(labels[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(HostError err) {
  switch (err) {
    case HostError::EmptyHost:
      return "EmptyHost";
    case HostError::UnparseableHost:
      return "UnparseableHost";
  }
  return "HostError";
}

std::string_view to_string(OriginKind kind) {
  switch (kind) {
    case OriginKind::Internal:
      return "Internal";
    case OriginKind::External:
      return "External";
    case OriginKind::Allowlisted:
      return "Allowlisted";
  }
  return "OriginKind";
}

Result<PublicSuffixList, std::string> PublicSuffixList::parse(std::string_view text) {
  PublicSuffixList psl;
  for (auto raw_line : strings::split(text, '\n')) {
    auto line = strings::trim(raw_line);
    if (line.empty() || line.starts_with("//")) continue;
    // The format reads each line only up to the first whitespace.
    auto tokens = strings::split_ws(line);
    std::string rule = strings::to_lower(tokens.front());
    if (rule.starts_with("!")) {
      psl.exception_.insert(rule.substr(1));
    } else if (rule.starts_with("*.")) {
      psl.wildcard_.insert(rule.substr(2));
    } else if (rule == "*") {
      // Implicit default rule; always applied.
    } else {
      psl.exact_.insert(std::move(rule));
    }
  }
  if (psl.rule_count() == 0) {
    return std::string("public suffix list contains no rules");
  }
  return psl;
}

Result<PublicSuffixList, std::string> PublicSuffixList::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    return "cannot open public suffix list: " + file.string();
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

size_t PublicSuffixList::suffix_label_count(const std::vector<std::string_view>& labels) const {
  const size_t n = labels.size();
  size_t best_exception = 0;  // label count of longest matching exception rule
  size_t best_match = 0;      // label count of longest matching normal rule

  for (size_t i = 0; i < n; ++i) {
    std::string suffix = join_labels(labels, i);
    size_t count = n - i;
    if (exception_.contains(suffix) && count > best_exception) best_exception = count;
    if (exact_.contains(suffix) && count > best_match) best_match = count;
    // Wildcard rule "*.X" matches labels[i..] when labels[i+1..] == X.
    if (i + 1 < n && wildcard_.contains(join_labels(labels, i + 1)) && count > best_match) {
      best_match = count;
    }
  }

  // An exception rule prevails; its public suffix drops the leftmost label.
  if (best_exception > 0) return best_exception - 1;
  if (best_match > 0) return best_match;
  return 1;  // implicit "*" rule
}

std::string PublicSuffixList::public_suffix(std::string_view normalized_host) const {
  std::vector<std::string_view> labels = strings::split(normalized_host, '.');
  size_t count = suffix_label_count(labels);
  if (count >= labels.size()) return std::string(normalized_host);
  return join_labels(labels, labels.size() - count);
}

Result<HostDomain, HostError> registrable_domain(std::string_view host, const PublicSuffixList& psl) {
  std::string h = strings::to_lower(strings::trim(host));
  // DNS names are case-insensitive; a trailing dot is the root label.
  if (!h.empty() && h.back() == '.') h.pop_back();
  if (h.empty()) return HostError::EmptyHost;

  // Bracketed or raw IPv6 literal.
  if (h.front() == '[') {
    if (h.size() < 3 || h.back() != ']') return HostError::UnparseableHost;
    std::string inner = h.substr(1, h.size() - 2);
    if (!looks_like_ipv6(inner)) return HostError::UnparseableHost;
    return HostDomain{RegistrableDomain{inner}, false, true};
  }
  if (looks_like_ipv6(h)) {
    return HostDomain{RegistrableDomain{h}, false, true};
  }

  for (char c : h) {
    if (!is_hostname_char(c)) return HostError::UnparseableHost;
  }
  std::vector<std::string_view> labels = strings::split(h, '.');
  for (auto label : labels) {
    if (label.empty() || label.size() > 63) return HostError::UnparseableHost;
  }
  if (h.size() > 253) return HostError::UnparseableHost;

  if (looks_like_ipv4(labels)) {
    return HostDomain{RegistrableDomain{h}, false, true};
  }

  size_t suffix_count = psl.suffix_label_count(labels);
  if (suffix_count >= labels.size()) {
    // Host is itself a public suffix (or a bare label); nothing registrable.
    return HostDomain{RegistrableDomain{h}, false, false};
  }
  std::string value = join_labels(labels, labels.size() - suffix_count - 1);
  return HostDomain{RegistrableDomain{std::move(value)}, true, false};
}

Allowlist::Allowlist() { entries_.insert("w3.org"); }

Result<Allowlist, std::string> Allowlist::load(const std::filesystem::path& file,
                                               const PublicSuffixList& psl) {
  std::ifstream in(file);
  if (!in) {
    return "cannot open allowlist: " + file.string();
  }
  Allowlist allow;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto entry = strings::trim(line);
    if (entry.empty() || entry.starts_with("#")) continue;
    auto resolved = registrable_domain(entry, psl);
    if (!resolved.ok()) {
      return "allowlist line " + std::to_string(line_no) + ": unparseable entry";
    }
    allow.add(resolved.value().domain);
  }
  return allow;
}

void Allowlist::add(RegistrableDomain domain) { entries_.insert(std::move(domain.value)); }

bool Allowlist::contains(const RegistrableDomain& domain) const {
  return entries_.contains(domain.value);
}

Result<ParsedUrl, HostError> parse_url(std::string_view url) {
  std::string_view rest = strings::trim(url);
  if (rest.empty()) return HostError::EmptyHost;

  ParsedUrl out;
  if (rest.starts_with("//")) {
    rest.remove_prefix(2);
    out.has_authority = true;
  } else {
    size_t colon = rest.find(':');
    if (colon == std::string_view::npos || colon == 0) return HostError::UnparseableHost;
    std::string_view scheme = rest.substr(0, colon);
    for (char c : scheme) {
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                c == '+' || c == '-' || c == '.';
      if (!ok) return HostError::UnparseableHost;
    }
    out.scheme = strings::to_lower(scheme);
    rest.remove_prefix(colon + 1);
    if (!rest.starts_with("//")) return HostError::UnparseableHost;  // mailto:, tel:, cid:
    rest.remove_prefix(2);
    out.has_authority = true;
  }

  // authority = [userinfo@]host[:port], ends at '/', '?' or '#'.
  size_t end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, end);
  if (end != std::string_view::npos) out.rest = std::string(rest.substr(end));
  size_t at = authority.rfind('@');
  if (at != std::string_view::npos) authority = authority.substr(at + 1);
  if (authority.empty()) return HostError::EmptyHost;

  if (authority.front() == '[') {
    size_t close = authority.find(']');
    if (close == std::string_view::npos) return HostError::UnparseableHost;
    out.host = strings::to_lower(authority.substr(0, close + 1));
    std::string_view after = authority.substr(close + 1);
    if (after.starts_with(":")) out.port = std::string(after.substr(1));
    else if (!after.empty()) return HostError::UnparseableHost;
  } else {
    size_t colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
      std::string_view port = authority.substr(colon + 1);
      for (char c : port) {
        if (c < '0' || c > '9') return HostError::UnparseableHost;
      }
      out.port = std::string(port);
      authority = authority.substr(0, colon);
    }
    if (authority.empty()) return HostError::EmptyHost;
    out.host = strings::to_lower(authority);
  }
  return out;
}

Result<OriginResult, HostError> classify_origin(std::string_view url,
                                                const RegistrableDomain& sender,
                                                const Allowlist& allow,
                                                const PublicSuffixList& psl) {
  auto parsed = parse_url(url);
  if (!parsed.ok()) return parsed.error();

  std::string host = parsed.value().host;
  if (!host.empty() && host.front() == '[') host = host.substr(1, host.size() - 2);
  auto resolved = registrable_domain(host, psl);
  if (!resolved.ok()) return resolved.error();

  OriginResult result;
  result.host_domain = resolved.value();
  result.host = host;

  const HostDomain& hd = result.host_domain;
  if (!hd.ip_literal && hd.domain == sender) {
    result.kind = OriginKind::Internal;
  } else if (!hd.ip_literal && allow.contains(hd.domain)) {
    result.kind = OriginKind::Allowlisted;
  } else {
    result.kind = OriginKind::External;
  }
  return result;
}

}  // namespace trackaudit
