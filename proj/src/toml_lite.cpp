#include "panolidar/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <string>

#include "panolidar/error.hpp"

namespace panolidar {

namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  json run() {
    json root = json::object();
    json* table = &root;
    while (!at_end()) {
      skip_blank();
      if (at_end()) break;
      if (peek() == '[') {
        table = parse_header(root);
      } else {
        parse_pair(*table);
      }
      finish_line();
    }
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("toml line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  // Whitespace, comments and empty lines.
  void skip_blank() {
    while (!at_end()) {
      skip_ws();
      if (at_end()) return;
      if (peek() == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else if (peek() == '\r') {
        ++pos_;
      } else if (peek() == '\n') {
        ++pos_;
        ++line_;
      } else {
        return;
      }
    }
  }

  void finish_line() {
    skip_ws();
    if (!at_end() && peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
    if (!at_end() && peek() == '\r') ++pos_;
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }

  std::string parse_key() {
    skip_ws();
    if (!at_end() && (peek() == '"' || peek() == '\'')) return parse_string();
    const auto start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::vector<std::string> parse_dotted_key() {
    std::vector<std::string> parts{parse_key()};
    skip_ws();
    while (!at_end() && peek() == '.') {
      ++pos_;
      parts.push_back(parse_key());
      skip_ws();
    }
    return parts;
  }

  json* descend(json& root, const std::vector<std::string>& parts, std::size_t count) {
    json* node = &root;
    for (std::size_t i = 0; i < count; ++i) {
      json& child = (*node)[parts[i]];
      if (child.is_null()) child = json::object();
      if (child.is_array()) {
        if (child.empty() || !child.back().is_object()) fail("key '" + parts[i] + "' is not a table");
        node = &child.back();
      } else if (child.is_object()) {
        node = &child;
      } else {
        fail("key '" + parts[i] + "' is not a table");
      }
    }
    return node;
  }

  json* parse_header(json& root) {
    ++pos_;
    const bool array = !at_end() && peek() == '[';
    if (array) ++pos_;
    const auto parts = parse_dotted_key();
    if (at_end() || peek() != ']') fail("unterminated table header");
    ++pos_;
    if (array) {
      if (at_end() || peek() != ']') fail("unterminated array-of-tables header");
      ++pos_;
    }
    json* parent = descend(root, parts, parts.size() - 1);
    json& slot = (*parent)[parts.back()];
    if (array) {
      if (slot.is_null()) slot = json::array();
      if (!slot.is_array()) fail("'" + parts.back() + "' redefined as an array of tables");
      slot.push_back(json::object());
      return &slot.back();
    }
    if (slot.is_null()) slot = json::object();
    if (!slot.is_object()) fail("'" + parts.back() + "' redefined as a table");
    return &slot;
  }

  void parse_pair(json& table) {
    const auto parts = parse_dotted_key();
    if (at_end() || peek() != '=') fail("expected '='");
    ++pos_;
    skip_ws();
    json* target = descend(table, parts, parts.size() - 1);
    if (target->contains(parts.back())) fail("duplicate key '" + parts.back() + "'");
    (*target)[parts.back()] = parse_value();
  }

  std::string parse_string() {
    const char quote = peek();
    ++pos_;
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = peek();
      ++pos_;
      if (c == quote) break;
      if (c == '\\' && quote == '"') {
        if (at_end()) fail("unterminated escape");
        const char e = peek();
        ++pos_;
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(std::string("unsupported escape \\") + e);
        }
        continue;
      }
      out.push_back(c);
    }
    return out;
  }

  json parse_value() {
    skip_ws();
    if (at_end()) fail("missing value");
    const char c = peek();
    if (c == '"' || c == '\'') return parse_string();
    if (c == '[') {
      ++pos_;
      json arr = json::array();
      while (true) {
        skip_blank();
        if (at_end()) fail("unterminated array");
        if (peek() == ']') {
          ++pos_;
          return arr;
        }
        arr.push_back(parse_value());
        skip_blank();
        if (!at_end() && peek() == ',') {
          ++pos_;
        } else if (at_end() || peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
    }
    const auto start = pos_;
    while (!at_end() && peek() != ',' && peek() != ']' && peek() != '#' && peek() != '\n' && peek() != '\r' &&
           peek() != ' ' && peek() != '\t') {
      ++pos_;
    }
    std::string token(text_.substr(start, pos_ - start));
    if (token == "true") return true;
    if (token == "false") return false;
    std::erase(token, '_');
    if (token.empty()) fail("missing value");
    std::string_view tv = token;
    if (tv.front() == '+') tv.remove_prefix(1);
    if (tv == "inf" || tv == "nan") fail("non-finite numbers are not accepted");
    const bool is_float = tv.find_first_of(".eE") != std::string_view::npos;
    if (!is_float) {
      long long i = 0;
      const auto [ptr, ec] = std::from_chars(tv.data(), tv.data() + tv.size(), i);
      if (ec == std::errc{} && ptr == tv.data() + tv.size()) return i;
    }
    double d = 0.0;
    const auto [ptr, ec] = std::from_chars(tv.data(), tv.data() + tv.size(), d);
    if (ec != std::errc{} || ptr != tv.data() + tv.size()) fail("cannot parse value '" + token + "'");
    return d;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

nlohmann::json parse_toml(std::string_view text) { return Parser(text).run(); }

nlohmann::json load_toml(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return parse_toml(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace panolidar
