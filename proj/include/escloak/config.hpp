#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "escloak/medium.hpp"

namespace escloak {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Common in-memory form for both accepted file formats.
struct ConfigValue {
  enum class Kind { boolean, number, string, array, table };
  Kind kind = Kind::table;
  bool b = false;
  double num = 0.0;
  std::string str;
  std::vector<ConfigValue> arr;
  std::map<std::string, ConfigValue> tab;

  static ConfigValue boolean(bool v) {
    ConfigValue c;
    c.kind = Kind::boolean;
    c.b = v;
    return c;
  }
  static ConfigValue number(double v) {
    ConfigValue c;
    c.kind = Kind::number;
    c.num = v;
    return c;
  }
  static ConfigValue string(std::string v) {
    ConfigValue c;
    c.kind = Kind::string;
    c.str = std::move(v);
    return c;
  }

  bool has(const std::string& key) const { return tab.count(key) != 0; }

  const ConfigValue* find(const std::string& key) const {
    auto it = tab.find(key);
    return it == tab.end() ? nullptr : &it->second;
  }

  const ConfigValue& at(const std::string& key, const std::string& ctx) const {
    const ConfigValue* v = find(key);
    if (!v) throw ConfigError("config error: missing field '" + ctx + key + "'");
    return *v;
  }

  double as_number(const std::string& field) const {
    if (kind != Kind::number)
      throw ConfigError("config error: field '" + field + "' must be a number");
    return num;
  }
  bool as_bool(const std::string& field) const {
    if (kind != Kind::boolean)
      throw ConfigError("config error: field '" + field + "' must be a boolean");
    return b;
  }
  const std::string& as_string(const std::string& field) const {
    if (kind != Kind::string)
      throw ConfigError("config error: field '" + field + "' must be a string");
    return str;
  }
  const std::vector<ConfigValue>& as_array(const std::string& field) const {
    if (kind != Kind::array)
      throw ConfigError("config error: field '" + field + "' must be an array");
    return arr;
  }
  const std::map<std::string, ConfigValue>& as_table(const std::string& field) const {
    if (kind != Kind::table)
      throw ConfigError("config error: field '" + field + "' must be a table");
    return tab;
  }
};

namespace detail {

// Line-oriented parser for the TOML subset used by the config files:
// scalar keys, [tables], [[arrays of tables]], dotted headers, inline
// tables/arrays, strings, booleans, numbers, and # comments.
class TomlParser {
 public:
  explicit TomlParser(const std::string& text) : text_(text) {}

  ConfigValue parse() {
    ConfigValue root;
    ConfigValue* current = &root;
    while (more()) {
      skip_ws_and_comments();
      if (!more()) break;
      if (peek() == '[') {
        current = open_table(root);
        continue;
      }
      auto [key, value] = parse_key_value();
      if (current->tab.count(key)) fail("duplicate key '" + key + "'");
      current->tab.emplace(std::move(key), std::move(value));
      expect_line_end();
    }
    return root;
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;

  bool more() const { return pos_ < text_.size(); }
  char peek() const { return text_[pos_]; }
  char take() {
    char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config error: line " + std::to_string(line_) + ": " + msg);
  }

  void skip_spaces() {
    while (more() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) take();
  }

  void skip_ws_and_comments() {
    for (;;) {
      skip_spaces();
      if (more() && peek() == '#') {
        while (more() && peek() != '\n') take();
      }
      if (more() && peek() == '\n') {
        take();
        continue;
      }
      return;
    }
  }

  void expect_line_end() {
    skip_spaces();
    if (more() && peek() == '#')
      while (more() && peek() != '\n') take();
    if (!more()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    take();
  }

  std::string parse_bare_key() {
    skip_spaces();
    std::string key;
    while (more() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                      peek() == '-'))
      key += take();
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> parse_dotted_key() {
    std::vector<std::string> parts{parse_bare_key()};
    skip_spaces();
    while (more() && peek() == '.') {
      take();
      parts.push_back(parse_bare_key());
      skip_spaces();
    }
    return parts;
  }

  ConfigValue* open_table(ConfigValue& root) {
    take();  // '['
    const bool array_of_tables = more() && peek() == '[';
    if (array_of_tables) take();
    const auto parts = parse_dotted_key();
    if (!more() || take() != ']') fail("expected ']' to close table header");
    if (array_of_tables && (!more() || take() != ']')) fail("expected ']]' to close table header");
    expect_line_end();

    ConfigValue* node = &root;
    for (size_t i = 0; i < parts.size(); ++i) {
      const bool last = i + 1 == parts.size();
      ConfigValue& slot = node->tab[parts[i]];
      if (last && array_of_tables) {
        if (slot.kind == ConfigValue::Kind::table && slot.tab.empty())
          slot.kind = ConfigValue::Kind::array;  // first [[...]] for this key
        if (slot.kind != ConfigValue::Kind::array)
          fail("'" + parts[i] + "' is not an array of tables");
        slot.arr.emplace_back();
        node = &slot.arr.back();
      } else if (slot.kind == ConfigValue::Kind::array && !slot.arr.empty()) {
        node = &slot.arr.back();
      } else {
        if (slot.kind != ConfigValue::Kind::table) fail("'" + parts[i] + "' is not a table");
        node = &slot;
      }
    }
    return node;
  }

  std::pair<std::string, ConfigValue> parse_key_value() {
    std::string key = parse_bare_key();
    skip_spaces();
    if (!more() || take() != '=') fail("expected '=' after key '" + key + "'");
    skip_spaces();
    return {std::move(key), parse_value()};
  }

  ConfigValue parse_value() {
    skip_spaces();
    if (!more()) fail("expected a value");
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string word = parse_bare_key();
      if (word == "true") return ConfigValue::boolean(true);
      if (word == "false") return ConfigValue::boolean(false);
      fail("unrecognised value '" + word + "'");
    }
    return parse_number();
  }

  ConfigValue parse_string() {
    take();  // '"'
    std::string out;
    while (more() && peek() != '"') {
      char c = take();
      if (c == '\\' && more()) {
        char esc = take();
        switch (esc) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape '\\") + esc + "'");
        }
        continue;
      }
      if (c == '\n') fail("unterminated string");
      out += c;
    }
    if (!more()) fail("unterminated string");
    take();  // closing '"'
    return ConfigValue::string(std::move(out));
  }

  ConfigValue parse_number() {
    std::string tok;
    while (more() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '+' ||
                      peek() == '-' || peek() == '.' || peek() == 'e' || peek() == 'E' ||
                      peek() == '_'))
      tok += take();
    std::string cleaned;
    for (char c : tok)
      if (c != '_') cleaned += c;
    try {
      size_t used = 0;
      double v = std::stod(cleaned, &used);
      if (used != cleaned.size()) throw std::invalid_argument("trailer");
      return ConfigValue::number(v);
    } catch (const std::exception&) {
      fail("invalid number '" + tok + "'");
    }
  }

  ConfigValue parse_array() {
    take();  // '['
    ConfigValue out;
    out.kind = ConfigValue::Kind::array;
    for (;;) {
      skip_ws_and_comments();
      if (!more()) fail("unterminated array");
      if (peek() == ']') {
        take();
        return out;
      }
      out.arr.push_back(parse_value());
      skip_ws_and_comments();
      if (more() && peek() == ',') {
        take();
        continue;
      }
      if (more() && peek() == ']') {
        take();
        return out;
      }
      fail("expected ',' or ']' in array");
    }
  }

  ConfigValue parse_inline_table() {
    take();  // '{'
    ConfigValue out;
    skip_spaces();
    if (more() && peek() == '}') {
      take();
      return out;
    }
    for (;;) {
      auto [key, value] = parse_key_value();
      out.tab.emplace(std::move(key), std::move(value));
      skip_spaces();
      if (more() && peek() == ',') {
        take();
        skip_spaces();
        continue;
      }
      if (more() && peek() == '}') {
        take();
        return out;
      }
      fail("expected ',' or '}' in inline table");
    }
  }
};

inline ConfigValue from_json(const nlohmann::json& j) {
  ConfigValue out;
  switch (j.type()) {
    case nlohmann::json::value_t::boolean:
      return ConfigValue::boolean(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
    case nlohmann::json::value_t::number_unsigned:
    case nlohmann::json::value_t::number_float:
      return ConfigValue::number(j.get<double>());
    case nlohmann::json::value_t::string:
      return ConfigValue::string(j.get<std::string>());
    case nlohmann::json::value_t::array:
      out.kind = ConfigValue::Kind::array;
      for (const auto& item : j) out.arr.push_back(from_json(item));
      return out;
    case nlohmann::json::value_t::object:
      for (auto it = j.begin(); it != j.end(); ++it) out.tab[it.key()] = from_json(it.value());
      return out;
    default:
      throw ConfigError("config error: unsupported JSON value type");
  }
}

}  // namespace detail

inline ConfigValue parse_toml(const std::string& text) {
  return detail::TomlParser(text).parse();
}

inline ConfigValue parse_json(const std::string& text) {
  try {
    return detail::from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
}

inline ConfigValue load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config error: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return json ? parse_json(buf.str()) : parse_toml(buf.str());
}

inline Material parse_material(const ConfigValue& v, const std::string& ctx) {
  v.as_table(ctx);
  Material m;
  m.lambda = v.at("lambda", ctx + ".").as_number(ctx + ".lambda");
  m.mu = v.at("mu", ctx + ".").as_number(ctx + ".mu");
  m.rho = v.has("rho") ? v.find("rho")->as_number(ctx + ".rho") : 1.0;
  return m;
}

// Stack schema: radii = [..], [background] {lambda, mu, rho}, [[layers]] {...}.
inline LayerStack parse_stack(const ConfigValue& root) {
  LayerStack stack;
  if (const ConfigValue* bg = root.find("background")) stack.background = parse_material(*bg, "background");
  if (const ConfigValue* layers = root.find("layers")) {
    size_t idx = 0;
    for (const auto& entry : layers->as_array("layers"))
      stack.layers.push_back(parse_material(entry, "layers[" + std::to_string(idx++) + "]"));
  }
  if (const ConfigValue* radii = root.find("radii")) {
    stack.radii.clear();
    size_t idx = 0;
    for (const auto& r : radii->as_array("radii"))
      stack.radii.push_back(r.as_number("radii[" + std::to_string(idx++) + "]"));
  } else {
    stack.radii = default_radii(stack.L());
  }
  const StackReport report = validate_stack(stack);
  if (!report.ok()) throw ConfigError("config error: " + report.errors.front());
  return stack;
}

inline LayerStack load_stack_file(const std::string& path) {
  return parse_stack(load_config_file(path));
}

}  // namespace escloak
