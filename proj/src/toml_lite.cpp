#include "vanet/toml_lite.hpp"

#include "vanet/format.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace vanet::toml {

using nlohmann::json;

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  json run() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (!eof() && peek() == '[') fail("arrays of tables are not supported");
        skip_ws();
        auto path = key_path();
        skip_ws();
        expect(']');
        end_of_line();
        table = &root;
        for (const auto& k : path) table = &descend(*table, k, true);
        if (!defined_tables_.insert_unique(path)) fail("table [" + join(path) + "] defined twice");
        continue;
      }
      auto path = key_path();
      skip_ws();
      expect('=');
      skip_ws();
      json value = parse_value();
      end_of_line();
      assign(*table, path, std::move(value));
    }
    return root;
  }

 private:
  struct PathSet {
    std::vector<std::vector<std::string>> seen;
    bool insert_unique(const std::vector<std::string>& p) {
      for (const auto& q : seen)
        if (q == p) return false;
      seen.push_back(p);
      return true;
    }
  };

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  PathSet defined_tables_;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, msg); }
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  bool newline() {
    if (eof()) return false;
    if (peek() == '\r' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '\n') ++pos_;
    if (peek() != '\n') return false;
    ++pos_;
    ++line_;
    return true;
  }

  void skip_blank_lines() {
    while (true) {
      skip_ws();
      skip_comment();
      if (!newline()) return;
    }
  }

  // Inside arrays newlines and comments are whitespace.
  void skip_array_space() {
    while (true) {
      skip_ws();
      skip_comment();
      if (!newline()) return;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (!eof() && !newline()) fail("unexpected text after value");
  }

  static bool bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
  }

  std::string key() {
    if (eof()) fail("expected a key");
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    const std::size_t start = pos_;
    while (!eof() && bare_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> path{key()};
    while (true) {
      skip_ws();
      if (eof() || peek() != '.') return path;
      ++pos_;
      skip_ws();
      path.push_back(key());
    }
  }

  static std::string join(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& k : path) out += (out.empty() ? "" : ".") + k;
    return out;
  }

  json& descend(json& table, const std::string& k, bool create) {
    if (!table.contains(k)) {
      if (!create) fail("no table '" + k + "'");
      table[k] = json::object();
    }
    json& next = table[k];
    if (!next.is_object()) fail("key '" + k + "' is not a table");
    return next;
  }

  void assign(json& table, const std::vector<std::string>& path, json value) {
    json* t = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) t = &descend(*t, path[i], true);
    if (t->contains(path.back())) fail("duplicate key '" + join(path) + "'");
    (*t)[path.back()] = std::move(value);
  }

  std::string basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated string");
      const char e = s_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'u': {
          if (pos_ + 4 > s_.size()) fail("bad \\u escape");
          unsigned cp = 0;
          auto r = std::from_chars(s_.data() + pos_, s_.data() + pos_ + 4, cp, 16);
          if (r.ptr != s_.data() + pos_ + 4) fail("bad \\u escape");
          pos_ += 4;
          append_utf8(out, cp);
          break;
        }
        default: fail(std::string("unknown escape \\") + e);
      }
    }
  }

  static void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string literal_string() {
    expect('\'');
    const std::size_t start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (eof() || peek() != '\'') fail("unterminated string");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  json parse_value() {
    if (eof()) fail("expected a value");
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    return scalar();
  }

  json array() {
    expect('[');
    json out = json::array();
    while (true) {
      skip_array_space();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      out.push_back(parse_value());
      skip_array_space();
      if (!eof() && peek() == ',') {
        ++pos_;
        continue;
      }
      skip_array_space();
      expect(']');
      return out;
    }
  }

  json inline_table() {
    expect('{');
    json out = json::object();
    skip_ws();
    if (!eof() && peek() == '}') {
      ++pos_;
      return out;
    }
    while (true) {
      skip_ws();
      auto path = key_path();
      skip_ws();
      expect('=');
      skip_ws();
      assign(out, path, parse_value());
      skip_ws();
      if (!eof() && peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return out;
    }
  }

  json scalar() {
    const std::size_t start = pos_;
    while (!eof() && peek() != ',' && peek() != ']' && peek() != '}' && peek() != '#' && peek() != '\n' &&
           peek() != ' ' && peek() != '\t' && peek() != '\r')
      ++pos_;
    const std::string_view tok = s_.substr(start, pos_ - start);
    if (tok.empty()) fail("expected a value");
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string cleaned;
    for (std::size_t i = 0; i < tok.size(); ++i) {
      if (tok[i] == '_') {
        if (i == 0 || i + 1 == tok.size() || !std::isdigit(static_cast<unsigned char>(tok[i - 1])) ||
            !std::isdigit(static_cast<unsigned char>(tok[i + 1])))
          fail("misplaced '_' in number '" + std::string(tok) + "'");
        continue;
      }
      cleaned += tok[i];
    }
    std::string_view body = cleaned;
    const bool negative = !body.empty() && body.front() == '-';
    std::string_view mag = body;
    if (!mag.empty() && (mag.front() == '-' || mag.front() == '+')) mag.remove_prefix(1);
    if (mag == "inf") return negative ? -HUGE_VAL : HUGE_VAL;
    if (mag == "nan") return std::nan("");
    const bool is_float = cleaned.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      std::int64_t v = 0;
      if (parse_number(body, v)) return v;
    } else {
      double v = 0.0;
      if (parse_number(body, v)) return v;
    }
    fail("invalid value '" + std::string(tok) + "'");
  }
};

bool needs_quotes(const std::string& k) {
  if (k.empty()) return true;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-')) return true;
  return false;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string key_text(const std::string& k) { return needs_quotes(k) ? quote(k) : k; }

std::string value_text(const json& v) {
  switch (v.type()) {
    case json::value_t::boolean: return v.get<bool>() ? "true" : "false";
    case json::value_t::number_integer: return std::to_string(v.get<std::int64_t>());
    case json::value_t::number_unsigned: return std::to_string(v.get<std::uint64_t>());
    case json::value_t::number_float: {
      const double d = v.get<double>();
      if (std::isnan(d)) return "nan";
      if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
      std::string t = format_double(d);
      if (t.find_first_of(".e") == std::string::npos) t += ".0";
      return t;
    }
    case json::value_t::string: return quote(v.get<std::string>());
    case json::value_t::array: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + value_text(v[i]);
      return out + "]";
    }
    case json::value_t::object: {
      std::string out = "{";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        out += (first ? "" : ", ") + key_text(it.key()) + " = " + value_text(it.value());
        first = false;
      }
      return out + "}";
    }
    default: throw std::invalid_argument("toml::dump: null has no TOML form");
  }
}

void dump_table(const json& t, const std::string& prefix, std::string& out) {
  for (auto it = t.begin(); it != t.end(); ++it)
    if (!it.value().is_object()) out += key_text(it.key()) + " = " + value_text(it.value()) + "\n";
  for (auto it = t.begin(); it != t.end(); ++it) {
    if (!it.value().is_object()) continue;
    const std::string name = prefix.empty() ? key_text(it.key()) : prefix + "." + key_text(it.key());
    out += "\n[" + name + "]\n";
    dump_table(it.value(), name, out);
  }
}

}  // namespace

json parse(std::string_view text) { return Parser(text).run(); }

std::string dump(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("toml::dump: document must be an object");
  std::string out;
  dump_table(doc, "", out);
  return out;
}

}  // namespace vanet::toml
