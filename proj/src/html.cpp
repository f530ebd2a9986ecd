#include "trackaudit/html.hpp"

#include <array>
#include <cstdint>

#include "trackaudit/strings.hpp"

namespace trackaudit::html {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f'; }

bool is_void_element(std::string_view tag) {
  static const std::array<std::string_view, 14> kVoid = {
      "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta",
      "param", "source", "track", "wbr"};
  for (auto v : kVoid) {
    if (v == tag) return true;
  }
  return false;
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp <= 0x7F) {
    out.push_back(static_cast<char>(cp));
  } else if (cp <= 0x7FF) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0xFFFF) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0x10FFFF) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Case-insensitive search for "</tag" starting at `from`; npos when absent.
size_t find_close_tag(std::string_view s, std::string_view tag, size_t from) {
  for (size_t i = from; i + tag.size() + 2 <= s.size(); ++i) {
    if (s[i] != '<' || s[i + 1] != '/') continue;
    size_t j = 0;
    while (j < tag.size() && strings::ascii_lower(s[i + 2 + j]) == tag[j]) ++j;
    if (j != tag.size()) continue;
    size_t after = i + 2 + j;
    char c = (after < s.size()) ? strings::ascii_lower(s[after]) : '>';
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return i;
  }
  return std::string_view::npos;
}

struct Parser {
  std::string_view in;
  size_t pos = 0;
  std::vector<Element> elements;
  std::vector<size_t> open;  // indices into elements

  void text_event(std::string_view raw) {
    if (raw.empty() || open.empty()) return;
    std::string decoded = decode_entities(raw);
    for (size_t idx : open) elements[idx].text += decoded;
  }

  void raw_text_event(std::string_view raw, size_t idx) { elements[idx].text.append(raw); }

  void close_tag(std::string_view name) {
    std::string tag = strings::to_lower(name);
    for (size_t i = open.size(); i-- > 0;) {
      if (elements[open[i]].tag == tag) {
        open.resize(i);
        return;
      }
    }
    // Stray close tag: ignore.
  }

  // pos is at '<' with a letter after it. Returns the parsed element index.
  size_t open_tag() {
    size_t start = pos + 1;
    size_t i = start;
    while (i < in.size() && !is_ws(in[i]) && in[i] != '>' && in[i] != '/') ++i;
    Element el;
    el.tag = strings::to_lower(in.substr(start, i - start));
    el.order = elements.size();

    bool self_closing = false;
    while (i < in.size() && in[i] != '>') {
      while (i < in.size() && is_ws(in[i])) ++i;
      if (i < in.size() && in[i] == '/') {
        self_closing = true;
        ++i;
        continue;
      }
      if (i >= in.size() || in[i] == '>') break;
      size_t name_start = i;
      while (i < in.size() && !is_ws(in[i]) && in[i] != '=' && in[i] != '>' && in[i] != '/') ++i;
      std::string name = strings::to_lower(in.substr(name_start, i - name_start));
      std::string value;
      while (i < in.size() && is_ws(in[i])) ++i;
      if (i < in.size() && in[i] == '=') {
        ++i;
        while (i < in.size() && is_ws(in[i])) ++i;
        if (i < in.size() && (in[i] == '"' || in[i] == '\'')) {
          char quote = in[i++];
          size_t vstart = i;
          while (i < in.size() && in[i] != quote) ++i;
          value = decode_entities(in.substr(vstart, i - vstart));
          if (i < in.size()) ++i;
        } else {
          size_t vstart = i;
          while (i < in.size() && !is_ws(in[i]) && in[i] != '>') ++i;
          value = decode_entities(in.substr(vstart, i - vstart));
        }
      }
      if (!name.empty()) el.attrs.push_back({std::move(name), std::move(value)});
    }
    if (i < in.size()) ++i;  // consume '>'
    pos = i;

    std::string tag = el.tag;
    elements.push_back(std::move(el));
    size_t idx = elements.size() - 1;

    if (tag == "script" || tag == "style" || tag == "textarea" || tag == "title") {
      // Raw-text content: consume up to the matching close tag so embedded
      // angle brackets are never parsed as markup.
      size_t close = find_close_tag(in, tag, pos);
      size_t content_end = (close == std::string_view::npos) ? in.size() : close;
      if (tag != "script") raw_text_event(in.substr(pos, content_end - pos), idx);
      if (close == std::string_view::npos) {
        pos = in.size();
      } else {
        size_t gt = in.find('>', close);
        pos = (gt == std::string_view::npos) ? in.size() : gt + 1;
      }
      return idx;
    }

    if (!self_closing && !is_void_element(tag)) open.push_back(idx);
    return idx;
  }

  void run() {
    while (pos < in.size()) {
      size_t lt = in.find('<', pos);
      if (lt == std::string_view::npos) {
        text_event(in.substr(pos));
        break;
      }
      text_event(in.substr(pos, lt - pos));
      pos = lt;
      if (pos + 1 >= in.size()) break;
      char next = in[pos + 1];
      if (next == '!') {
        if (in.compare(pos, 4, "<!--") == 0) {
          size_t end = in.find("-->", pos + 4);
          pos = (end == std::string_view::npos) ? in.size() : end + 3;
        } else {
          size_t end = in.find('>', pos);
          pos = (end == std::string_view::npos) ? in.size() : end + 1;
        }
      } else if (next == '?') {
        size_t end = in.find('>', pos);
        pos = (end == std::string_view::npos) ? in.size() : end + 1;
      } else if (next == '/') {
        size_t name_start = pos + 2;
        size_t end = in.find('>', name_start);
        size_t name_end = (end == std::string_view::npos) ? in.size() : end;
        size_t space = name_start;
        while (space < name_end && !is_ws(in[space])) ++space;
        close_tag(in.substr(name_start, space - name_start));
        pos = (end == std::string_view::npos) ? in.size() : end + 1;
      } else if ((next >= 'a' && next <= 'z') || (next >= 'A' && next <= 'Z')) {
        open_tag();
      } else {
        text_event(in.substr(pos, 1));
        ++pos;
      }
    }
  }
};

}  // namespace

const std::string* Element::attr(std::string_view name) const {
  for (const auto& a : attrs) {
    if (a.name == name) return &a.value;
  }
  return nullptr;
}

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    size_t semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 32) {
      out.push_back(text[i++]);
      continue;
    }
    std::string_view entity = text.substr(i + 1, semi - i - 1);
    if (entity == "amp") {
      out.push_back('&');
    } else if (entity == "lt") {
      out.push_back('<');
    } else if (entity == "gt") {
      out.push_back('>');
    } else if (entity == "quot") {
      out.push_back('"');
    } else if (entity == "apos") {
      out.push_back('\'');
    } else if (entity == "nbsp") {
      out.push_back(' ');
    } else if (entity.starts_with("#")) {
      uint32_t cp = 0;
      bool valid = entity.size() > 1;
      if (entity.size() > 2 && (entity[1] == 'x' || entity[1] == 'X')) {
        for (size_t j = 2; j < entity.size() && valid; ++j) {
          char c = strings::ascii_lower(entity[j]);
          if (c >= '0' && c <= '9') cp = cp * 16 + (c - '0');
          else if (c >= 'a' && c <= 'f') cp = cp * 16 + (c - 'a' + 10);
          else valid = false;
        }
      } else {
        for (size_t j = 1; j < entity.size() && valid; ++j) {
          if (entity[j] >= '0' && entity[j] <= '9') cp = cp * 10 + (entity[j] - '0');
          else valid = false;
        }
      }
      if (valid && cp > 0 && cp <= 0x10FFFF) {
        append_utf8(out, cp);
      } else {
        out.push_back('&');
        ++i;
        continue;
      }
    } else {
      out.push_back('&');
      ++i;
      continue;
    }
    i = semi + 1;
  }
  return out;
}

std::vector<Element> parse(std::string_view markup) {
  Parser p{markup};
  p.run();
  return std::move(p.elements);
}

std::vector<std::string> extract_css_urls(std::string_view css) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i + 4 <= css.size()) {
    if (strings::ascii_lower(css[i]) == 'u' && strings::ascii_lower(css[i + 1]) == 'r' &&
        strings::ascii_lower(css[i + 2]) == 'l' && css[i + 3] == '(') {
      size_t close = css.find(')', i + 4);
      if (close == std::string_view::npos) break;
      auto token = strings::trim(css.substr(i + 4, close - i - 4));
      if (token.size() >= 2 && (token.front() == '"' || token.front() == '\'') &&
          token.back() == token.front()) {
        token = token.substr(1, token.size() - 2);
      }
      if (!token.empty()) out.emplace_back(token);
      i = close + 1;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace trackaudit::html
