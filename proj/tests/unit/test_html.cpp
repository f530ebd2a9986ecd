#include <doctest.h>

#include "trackaudit/html.hpp"

using namespace trackaudit;

namespace {

const html::Element* find_tag(const std::vector<html::Element>& elements, std::string_view tag) {
  for (const auto& el : elements) {
    if (el.tag == tag) return &el;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("basic tags and attributes") {
  auto elements = html::parse(R"(<img src="http://x.example/a.png" WIDTH=1 height='1'>)");
  REQUIRE(elements.size() == 1);
  CHECK(elements[0].tag == "img");
  CHECK(*elements[0].attr("src") == "http://x.example/a.png");
  CHECK(*elements[0].attr("width") == "1");
  CHECK(*elements[0].attr("height") == "1");
}

TEST_CASE("subtree text accumulates through nesting") {
  auto elements = html::parse("<div><a>J&#39;accepte</a> les <b>cookies</b></div>");
  const auto* div = find_tag(elements, "div");
  const auto* a = find_tag(elements, "a");
  REQUIRE(div != nullptr);
  REQUIRE(a != nullptr);
  CHECK(a->text == "J'accepte");
  CHECK(div->text == "J'accepte les cookies");
}

TEST_CASE("script content is never reparsed as markup") {
  auto elements = html::parse(
      R"(<script>var s = "<img src='http://evil.example/x.gif'>";</script><p>ok</p>)");
  CHECK(find_tag(elements, "img") == nullptr);
  REQUIRE(find_tag(elements, "p") != nullptr);
  CHECK(find_tag(elements, "p")->text == "ok");
}

TEST_CASE("style element keeps raw css as text") {
  auto elements = html::parse("<style>body { background: url('http://x.example/bg.png'); }</style>");
  const auto* style = find_tag(elements, "style");
  REQUIRE(style != nullptr);
  auto urls = html::extract_css_urls(style->text);
  REQUIRE(urls.size() == 1);
  CHECK(urls[0] == "http://x.example/bg.png");
}

TEST_CASE("comments and doctype are skipped") {
  auto elements = html::parse("<!DOCTYPE html><!-- <img src='http://no.example/'> --><p>t</p>");
  CHECK(find_tag(elements, "img") == nullptr);
  CHECK(find_tag(elements, "p") != nullptr);
}

TEST_CASE("unterminated markup degrades without losing earlier content") {
  auto elements = html::parse(R"(<p>text</p><img src="http://x.example/a.gif)");
  const auto* img = find_tag(elements, "img");
  REQUIRE(img != nullptr);
  CHECK(*img->attr("src") == "http://x.example/a.gif");
}

TEST_CASE("mismatched close tags are tolerated") {
  auto elements = html::parse("<div><span>inner</div></span><a>after</a>");
  CHECK(find_tag(elements, "a") != nullptr);
  CHECK(find_tag(elements, "a")->text == "after");
}

TEST_CASE("entity decoding") {
  CHECK(html::decode_entities("a &amp; b") == "a & b");
  CHECK(html::decode_entities("&lt;tag&gt;") == "<tag>");
  CHECK(html::decode_entities("&#x27;x&#39;") == "'x'");
  CHECK(html::decode_entities("&eacute;") == "&eacute;");  // unknown entities kept
  CHECK(html::decode_entities("tout&nbsp;accepter") == "tout accepter");
}

TEST_CASE("css url forms") {
  auto urls = html::extract_css_urls(
      "@import url(\"http://a.example/f.css\"); .x{background:URL( 'http://b.example/i.png' )} "
      ".y{background:url(http://c.example/j.png)}");
  REQUIRE(urls.size() == 3);
  CHECK(urls[0] == "http://a.example/f.css");
  CHECK(urls[1] == "http://b.example/i.png");
  CHECK(urls[2] == "http://c.example/j.png");
}
