#pragma once

// Minimal TOML reader covering the subset used by the CLI configuration
// files: top-level key/value pairs, [tables], [[arrays of tables]], basic
// strings, integers, floats, booleans, and (possibly multi-line) arrays.
// Anything outside that subset is rejected with InvalidConfig.

#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "navmine/errors.hpp"

namespace navmine::toml {

class Value;
using Array = std::vector<Value>;

class Value {
 public:
  explicit Value(std::string v) : v_(std::move(v)) {}
  explicit Value(std::int64_t v) : v_(v) {}
  explicit Value(double v) : v_(v) {}
  explicit Value(bool v) : v_(v) {}
  explicit Value(Array v) : v_(std::move(v)) {}

  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_float() const { return std::holds_alternative<double>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_array() const { return std::holds_alternative<Array>(v_); }

  const std::string& as_string() const { return get<std::string>("string"); }
  std::int64_t as_int() const { return get<std::int64_t>("integer"); }
  bool as_bool() const { return get<bool>("boolean"); }
  const Array& as_array() const { return get<Array>("array"); }

  // Integers promote to floating point.
  double as_float() const {
    if (is_int()) return static_cast<double>(std::get<std::int64_t>(v_));
    return get<double>("float");
  }

 private:
  template <typename T>
  const T& get(const char* wanted) const {
    if (!std::holds_alternative<T>(v_))
      fail(Errc::invalid_config, std::string("toml: expected a ") + wanted + " value");
    return std::get<T>(v_);
  }

  std::variant<std::string, std::int64_t, double, bool, Array> v_;
};

struct Table {
  std::map<std::string, Value> entries;

  bool contains(const std::string& key) const { return entries.count(key) != 0; }

  const Value& at(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end())
      fail(Errc::invalid_config, "toml: missing required key '" + key + "'");
    return it->second;
  }

  std::string get_string(const std::string& key) const { return at(key).as_string(); }
  std::int64_t get_int(const std::string& key) const { return at(key).as_int(); }
  double get_float(const std::string& key) const { return at(key).as_float(); }
  bool get_bool(const std::string& key) const { return at(key).as_bool(); }

  std::string get_string_or(const std::string& key, std::string dflt) const {
    return contains(key) ? at(key).as_string() : std::move(dflt);
  }
  std::int64_t get_int_or(const std::string& key, std::int64_t dflt) const {
    return contains(key) ? at(key).as_int() : dflt;
  }
  double get_float_or(const std::string& key, double dflt) const {
    return contains(key) ? at(key).as_float() : dflt;
  }
  bool get_bool_or(const std::string& key, bool dflt) const {
    return contains(key) ? at(key).as_bool() : dflt;
  }
};

struct Document {
  Table root;
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> table_arrays;

  const Table& table(const std::string& name) const {
    auto it = tables.find(name);
    if (it == tables.end())
      fail(Errc::invalid_config, "toml: missing required table [" + name + "]");
    return it->second;
  }
};

namespace detail {

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& msg) {
  fail(Errc::invalid_config, "toml: line " + std::to_string(line) + ": " + msg);
}

inline bool is_bare_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '-';
}

// Removes a trailing comment, ignoring '#' inside basic strings.
inline std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_string) {
      if (c == '\\' && i + 1 < line.size()) { ++i; continue; }
      if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Net bracket depth outside strings; used to join multi-line arrays.
inline int bracket_balance(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (c == '\\' && i + 1 < s.size()) { ++i; continue; }
      if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

class ValueParser {
 public:
  ValueParser(const std::string& text, std::size_t line) : text_(text), line_(line) {}

  Value parse() {
    Value v = parse_value();
    skip_ws();
    if (pos_ != text_.size())
      parse_fail(line_, "trailing characters after value");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  Value parse_value() {
    skip_ws();
    if (pos_ >= text_.size()) parse_fail(line_, "missing value");
    char c = text_[pos_];
    if (c == '"') return Value(parse_basic_string());
    if (c == '[') return Value(parse_array());
    if (text_.compare(pos_, 4, "true") == 0 && !is_bare_key_char_at(pos_ + 4)) {
      pos_ += 4;
      return Value(true);
    }
    if (text_.compare(pos_, 5, "false") == 0 && !is_bare_key_char_at(pos_ + 5)) {
      pos_ += 5;
      return Value(false);
    }
    return parse_number();
  }

  bool is_bare_key_char_at(std::size_t i) const {
    return i < text_.size() && is_bare_key_char(text_[i]);
  }

  std::string parse_basic_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= text_.size()) break;
        char e = text_[pos_++];
        switch (e) {
          case '"':  out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n':  out += '\n'; break;
          case 't':  out += '\t'; break;
          case 'r':  out += '\r'; break;
          default:
            parse_fail(line_, std::string("unsupported escape '\\") + e + "'");
        }
      } else {
        out += c;
      }
    }
    parse_fail(line_, "unterminated string");
  }

  Array parse_array() {
    ++pos_;  // opening bracket
    Array items;
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) parse_fail(line_, "unterminated array");
      if (text_[pos_] == ']') { ++pos_; return items; }
      items.push_back(parse_value());
      skip_ws();
      if (pos_ >= text_.size()) parse_fail(line_, "unterminated array");
      if (text_[pos_] == ',') { ++pos_; continue; }
      if (text_[pos_] == ']') { ++pos_; return items; }
      parse_fail(line_, "expected ',' or ']' in array");
    }
  }

  Value parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::string("+-0123456789._eE").find(text_[pos_]) != std::string::npos)
      ++pos_;
    std::string raw = text_.substr(start, pos_ - start);
    if (raw.empty()) parse_fail(line_, "invalid value");
    std::string digits;
    for (char c : raw) {
      if (c == '_') continue;  // TOML digit separator
      digits += c;
    }
    const bool is_float =
        digits.find('.') != std::string::npos || digits.find('e') != std::string::npos ||
        digits.find('E') != std::string::npos;
    std::istringstream in(digits);
    if (is_float) {
      double d = 0;
      in >> d;
      if (!in || in.peek() != std::char_traits<char>::eof())
        parse_fail(line_, "invalid float '" + raw + "'");
      return Value(d);
    }
    std::int64_t i = 0;
    in >> i;
    if (!in || in.peek() != std::char_traits<char>::eof())
      parse_fail(line_, "invalid integer '" + raw + "'");
    return Value(i);
  }

  const std::string& text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

inline std::string parse_key(const std::string& text, std::size_t line) {
  std::string key = trim(text);
  if (key.size() >= 2 && key.front() == '"' && key.back() == '"')
    return key.substr(1, key.size() - 2);
  if (key.empty()) parse_fail(line, "empty key");
  for (char c : key)
    if (!is_bare_key_char(c))
      parse_fail(line, "invalid character in key '" + key + "'");
  return key;
}

}  // namespace detail

inline Document parse(std::istream& in) {
  Document doc;
  Table* target = &doc.root;
  std::string physical;
  std::size_t line_no = 0;

  while (std::getline(in, physical)) {
    ++line_no;
    std::string logical = detail::trim(detail::strip_comment(physical));
    if (logical.empty()) continue;

    // Join continuation lines of a multi-line array.
    std::size_t first_line = line_no;
    while (detail::bracket_balance(logical) > 0) {
      if (!std::getline(in, physical))
        detail::parse_fail(first_line, "unterminated array");
      ++line_no;
      logical += " " + detail::trim(detail::strip_comment(physical));
    }

    if (logical.front() == '[') {
      if (logical.size() >= 4 && logical[1] == '[') {
        if (logical.substr(logical.size() - 2) != "]]")
          detail::parse_fail(first_line, "malformed table array header");
        std::string name = detail::parse_key(logical.substr(2, logical.size() - 4), first_line);
        doc.table_arrays[name].emplace_back();
        target = &doc.table_arrays[name].back();
      } else {
        if (logical.back() != ']')
          detail::parse_fail(first_line, "malformed table header");
        std::string name = detail::parse_key(logical.substr(1, logical.size() - 2), first_line);
        if (doc.tables.count(name))
          detail::parse_fail(first_line, "duplicate table [" + name + "]");
        target = &doc.tables[name];
      }
      continue;
    }

    std::size_t eq = std::string::npos;
    {
      bool in_string = false;
      for (std::size_t i = 0; i < logical.size(); ++i) {
        char c = logical[i];
        if (in_string) {
          if (c == '\\' && i + 1 < logical.size()) { ++i; continue; }
          if (c == '"') in_string = false;
        } else if (c == '"') {
          in_string = true;
        } else if (c == '=') {
          eq = i;
          break;
        }
      }
    }
    if (eq == std::string::npos)
      detail::parse_fail(first_line, "expected 'key = value'");

    std::string key = detail::parse_key(logical.substr(0, eq), first_line);
    std::string value_text = detail::trim(logical.substr(eq + 1));
    detail::ValueParser vp(value_text, first_line);
    if (!target->entries.emplace(key, vp.parse()).second)
      detail::parse_fail(first_line, "duplicate key '" + key + "'");
  }
  if (in.bad())
    fail(Errc::unreadable_input, "toml: read error");
  return doc;
}

inline Document parse(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

}  // namespace navmine::toml
