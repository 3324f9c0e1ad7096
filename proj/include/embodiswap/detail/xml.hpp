// Copyright 2026 The EmbodiSwap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal non-validating XML DOM, just enough for the URDF subset: elements,
// attributes, comments, processing instructions, DOCTYPE, and the five named
// entities plus numeric character references. No namespaces, no CDATA.

#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "embodiswap/errors.hpp"

namespace embodiswap::detail {

struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlNode> children;
  int line = 0;

  const std::string* attr(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) return &v;
    }
    return nullptr;
  }

  const XmlNode* child(std::string_view name_) const {
    for (const XmlNode& c : children) {
      if (c.name == name_) return &c;
    }
    return nullptr;
  }

  std::vector<const XmlNode*> children_named(std::string_view name_) const {
    std::vector<const XmlNode*> out;
    for (const XmlNode& c : children) {
      if (c.name == name_) out.push_back(&c);
    }
    return out;
  }
};

class XmlParser {
 public:
  explicit XmlParser(std::string_view text) : text_(text) {}

  XmlNode parse_document() {
    skip_prolog();
    XmlNode root = parse_element();
    skip_misc();
    if (pos_ != text_.size()) {
      fail("content after document element");
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::MalformedXml,
                "line " + std::to_string(line_) + ": " + what);
  }

  bool eof() const { return pos_ >= text_.size(); }

  char peek() const { return eof() ? '\0' : text_[pos_]; }

  char take() {
    if (eof()) fail("unexpected end of document");
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  bool consume(std::string_view s) {
    if (text_.substr(pos_, s.size()) != s) return false;
    for (size_t i = 0; i < s.size(); ++i) take();
    return true;
  }

  void skip_ws() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else {
        break;
      }
    }
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '-' || c == '.' || c == ':';
  }

  std::string parse_name() {
    std::string out;
    while (!eof() && is_name_char(peek())) out.push_back(take());
    if (out.empty()) fail("expected a name");
    return out;
  }

  void skip_until(std::string_view terminator) {
    while (!consume(terminator)) {
      if (eof()) fail(std::string("unterminated construct, expected '") +
                      std::string(terminator) + "'");
      take();
    }
  }

  // Comments, PIs, DOCTYPE, and whitespace before/after the root element.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (consume("<!--")) {
        skip_until("-->");
      } else if (consume("<?")) {
        skip_until("?>");
      } else {
        return;
      }
    }
  }

  void skip_prolog() {
    // UTF-8 BOM
    consume("\xEF\xBB\xBF");
    for (;;) {
      skip_ws();
      if (consume("<!--")) {
        skip_until("-->");
      } else if (consume("<?")) {
        skip_until("?>");
      } else if (consume("<!DOCTYPE")) {
        skip_until(">");
      } else {
        return;
      }
    }
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      const size_t end = raw.find(';', i);
      if (end == std::string_view::npos) fail("unterminated entity");
      const std::string_view name = raw.substr(i + 1, end - i - 1);
      if (name == "amp") {
        out.push_back('&');
      } else if (name == "lt") {
        out.push_back('<');
      } else if (name == "gt") {
        out.push_back('>');
      } else if (name == "quot") {
        out.push_back('"');
      } else if (name == "apos") {
        out.push_back('\'');
      } else if (!name.empty() && name[0] == '#') {
        const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
        long code = 0;
        try {
          code = std::stol(std::string(name.substr(hex ? 2 : 1)), nullptr,
                           hex ? 16 : 10);
        } catch (const std::exception&) {
          fail("bad character reference '&" + std::string(name) + ";'");
        }
        if (code <= 0 || code > 0x10FFFF) fail("character reference range");
        // Encode as UTF-8.
        const unsigned long cp = static_cast<unsigned long>(code);
        if (cp < 0x80) {
          out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
          out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
          out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
          out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
      } else {
        fail("unknown entity '&" + std::string(name) + ";'");
      }
      i = end;
    }
    return out;
  }

  std::string parse_attribute_value() {
    const char quote = take();
    if (quote != '"' && quote != '\'') fail("attribute value must be quoted");
    std::string raw;
    for (;;) {
      const char c = take();
      if (c == quote) break;
      if (c == '<') fail("'<' in attribute value");
      raw.push_back(c);
    }
    return decode_entities(raw);
  }

  XmlNode parse_element() {
    if (!consume("<")) fail("expected element");
    XmlNode node;
    node.line = line_;
    node.name = parse_name();

    for (;;) {
      skip_ws();
      if (consume("/>")) return node;
      if (consume(">")) break;
      std::string key = parse_name();
      skip_ws();
      if (!consume("=")) fail("expected '=' after attribute name");
      skip_ws();
      for (const auto& [k, v] : node.attributes) {
        if (k == key) fail("duplicate attribute '" + key + "'");
      }
      node.attributes.emplace_back(std::move(key), parse_attribute_value());
    }

    // Content: child elements and (discarded) character data.
    for (;;) {
      while (!eof() && peek() != '<') {
        const char c = take();
        if (c == '&') {
          // Validate the entity even though text is discarded.
          std::string raw = "&";
          while (!eof() && peek() != ';') raw.push_back(take());
          raw.push_back(take());
          decode_entities(raw);
        }
      }
      if (eof()) fail("unterminated element <" + node.name + ">");
      if (consume("<!--")) {
        skip_until("-->");
        continue;
      }
      if (consume("</")) {
        const std::string closing = parse_name();
        if (closing != node.name) {
          fail("mismatched closing tag </" + closing + "> for <" + node.name +
               ">");
        }
        skip_ws();
        if (!consume(">")) fail("malformed closing tag");
        return node;
      }
      node.children.push_back(parse_element());
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
};

inline XmlNode xml_parse(std::string_view text) {
  return XmlParser(text).parse_document();
}

}  // namespace embodiswap::detail
