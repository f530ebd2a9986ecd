#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trackaudit::html {

struct Attribute {
  std::string name;   // lowercase
  std::string value;  // entity-decoded
};

/// One element from a lenient single-pass scan. `text` is the decoded text
/// of the whole subtree (for style elements: the raw CSS). Unclosed tags are
/// closed at end of input; stray close tags are ignored.
struct Element {
  std::string tag;  // lowercase
  std::vector<Attribute> attrs;
  std::string text;
  size_t order = 0;  // document order of the open tag

  const std::string* attr(std::string_view name) const;
};

/// Best-effort tokenizer: survives unterminated tags, mismatched nesting,
/// attribute soup. Script content is consumed (never reinterpreted as
/// markup); style content is kept as the style element's text.
std::vector<Element> parse(std::string_view markup);

std::string decode_entities(std::string_view text);

/// url(...) tokens from a CSS fragment, unquoted and trimmed.
std::vector<std::string> extract_css_urls(std::string_view css);

}  // namespace trackaudit::html
