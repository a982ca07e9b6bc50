#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "neckpose/detail/text.hpp"
#include "neckpose/error.hpp"

namespace neckpose {

/// Plain-text `key = value` settings. Blank lines and `#` comments are
/// ignored; later duplicates override earlier ones.
class KeyValueConfig {
public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (detail::getline_stripped(in, line)) {
      ++line_no;
      const auto body = detail::trim(std::string_view(line).substr(0, line.find('#')));
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
      const auto key = detail::trim(body.substr(0, eq));
      if (key.empty()) throw ParseError(line_no, "empty key");
      cfg.values_[std::string(key)] = std::string(detail::trim(body.substr(eq + 1)));
    }
    return cfg;
  }

  static KeyValueConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static KeyValueConfig read_file(const std::string& path) {
    auto in = detail::open_input(path);
    return parse(in);
  }

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::optional<std::string> get(const std::string& key) const {
    if (auto it = values_.find(key); it != values_.end()) return it->second;
    return std::nullopt;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
  }

  double get_double(const std::string& key, double fallback) const {
    const auto raw = get(key);
    if (!raw) return fallback;
    const auto v = detail::to_double(*raw);
    if (!v) throw ConfigError("config key '" + key + "' is not a number: '" + *raw + "'");
    return *v;
  }

  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
    const auto raw = get(key);
    if (!raw) return fallback;
    const auto v = detail::to_integer<std::uint64_t>(*raw);
    if (!v) throw ConfigError("config key '" + key + "' is not a non-negative integer: '" + *raw + "'");
    return *v;
  }

  /// Rejects keys outside `known`, which catches misspelled settings.
  void require_known(const std::set<std::string>& known) const {
    for (const auto& [key, value] : values_)
      if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }

private:
  std::map<std::string, std::string> values_;
};

}  // namespace neckpose
